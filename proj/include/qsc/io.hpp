// io.hpp: JSON operator files and CSV trace files
//
// Complex numbers are [re, im] pairs, matrices are arrays of rows. Generator
// files carry a "vec" field that must read "column".

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsc/generator.hpp"
#include "qsc/hp_params.hpp"
#include "qsc/qsde_sim.hpp"

namespace qsc {

/// Malformed or inconsistent input file.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string generator_to_json(const FormGenerator& gen);
FormGenerator generator_from_json(const std::string& text);
void save_generator(const std::filesystem::path& path, const FormGenerator& gen);
FormGenerator load_generator(const std::filesystem::path& path);

std::string params_to_json(const HPParams& params);
// Rejects H that is not Hermitian to 1e-10.
HPParams params_from_json(const std::string& text);
void save_params(const std::filesystem::path& path, const HPParams& params);
HPParams load_params(const std::filesystem::path& path);

/// Observable file: either a bare matrix or {"matrix": ...}.
Matrix observable_from_json(const std::string& text);
std::string observable_to_json(const Matrix& X);
Matrix load_observable(const std::filesystem::path& path);

/// {"d": d, "T": T, "steps": N, "values": N x d matrix}
std::string coherent_to_json(const CoherentFunction& f);
CoherentFunction coherent_from_json(const std::string& text);
CoherentFunction load_coherent(const std::filesystem::path& path);

/// Columns t, re(Phi_ij), im(Phi_ij) with (i,j) row-major, then any extra
/// named columns. Values are printed with 17 significant digits so that
/// reading back reproduces every double exactly.
struct TraceTable {
    MatrixElementTrace trace;
    std::vector<std::string> extra_names;
    std::vector<std::vector<double>> extra;   // one column per name
};

std::string trace_to_csv(const TraceTable& table);
TraceTable trace_from_csv(const std::string& text);
void save_trace(const std::filesystem::path& path, const TraceTable& table);
TraceTable load_trace(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace qsc
