// io.cpp: JSON and CSV serialization

#include "qsc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qsc {

using nlohmann::json;

namespace {

json complex_to_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

cplx complex_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError("complex entries must be [re, im] number pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Matrix& A)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < A.cols(); ++k) row.push_back(complex_to_json(A(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
        throw ParseError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
    }
    Matrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ParseError(std::string(what) + ": expected " + std::to_string(cols) + " columns");
        }
        for (Eigen::Index k = 0; k < cols; ++k) A(i, k) = complex_from_json(row[k]);
    }
    return A;
}

// Square matrix of unknown size.
Matrix square_from_json(const json& j, const char* what)
{
    if (!j.is_array() || j.empty()) {
        throw ParseError(std::string(what) + ": expected a non-empty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(j.size());
    return matrix_from_json(j, n, n, what);
}

std::vector<Matrix> matrix_list(const json& j, std::size_t count, Eigen::Index rows,
                                Eigen::Index cols, const char* what)
{
    if (!j.is_array() || j.size() != count) {
        throw ParseError(std::string(what) + ": expected " + std::to_string(count) + " matrices");
    }
    std::vector<Matrix> out;
    for (const auto& e : j) out.push_back(matrix_from_json(e, rows, cols, what));
    return out;
}

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

int positive_int(const json& j, const char* key)
{
    const json& v = field(j, key);
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1000000) {
        throw ParseError(std::string("field \"") + key + "\" must be a positive integer");
    }
    return v.get<int>();
}

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

json superop_list(const std::vector<SuperOperator>& ops)
{
    json out = json::array();
    for (const auto& s : ops) out.push_back(matrix_to_json(s.action));
    return out;
}

} // namespace

std::string generator_to_json(const FormGenerator& gen)
{
    json j;
    j["n"] = gen.n;
    j["d"] = gen.d;
    j["vec"] = "column";
    j["scalar"] = matrix_to_json(gen.scalar.action);
    j["up"] = superop_list(gen.up);
    j["down"] = superop_list(gen.down);
    json mat = json::array();
    for (const auto& row : gen.matrix) mat.push_back(superop_list(row));
    j["matrix"] = std::move(mat);
    return j.dump(1) + "\n";
}

FormGenerator generator_from_json(const std::string& text)
{
    const json j = parse(text);
    const json& v = field(j, "vec");
    if (!v.is_string() || v.get<std::string>() != "column") {
        throw ParseError("generator file must declare \"vec\": \"column\"");
    }
    const int n = positive_int(j, "n");
    const int d = positive_int(j, "d");
    const Eigen::Index n2 = Eigen::Index(n) * n;
    auto wrap = [n](Matrix act) { return SuperOperator(n, n, std::move(act)); };
    auto wrap_all = [&](const std::vector<Matrix>& acts) {
        std::vector<SuperOperator> out;
        for (const auto& a : acts) out.push_back(wrap(a));
        return out;
    };
    SuperOperator scalar = wrap(matrix_from_json(field(j, "scalar"), n2, n2, "scalar"));
    auto up = wrap_all(matrix_list(field(j, "up"), d, n2, n2, "up"));
    auto down = wrap_all(matrix_list(field(j, "down"), d, n2, n2, "down"));
    const json& mj = field(j, "matrix");
    if (!mj.is_array() || static_cast<int>(mj.size()) != d) {
        throw ParseError("matrix: expected d rows of blocks");
    }
    std::vector<std::vector<SuperOperator>> matrix;
    for (const auto& row : mj) matrix.push_back(wrap_all(matrix_list(row, d, n2, n2, "matrix")));
    try {
        return {std::move(scalar), std::move(up), std::move(down), std::move(matrix)};
    } catch (const ShapeError& e) {
        throw ParseError(e.what());
    }
}

std::string params_to_json(const HPParams& p)
{
    json j;
    j["n"] = p.n;
    j["d"] = p.d;
    j["r"] = p.r;
    j["K"] = matrix_to_json(p.K);
    j["H"] = matrix_to_json(p.H);
    json row = json::array();
    for (const auto& Kn : p.K_row) row.push_back(matrix_to_json(Kn));
    j["K_row"] = std::move(row);
    json L = json::array();
    for (const auto& Li : p.kraus_L) L.push_back(matrix_to_json(Li));
    j["kraus_L"] = std::move(L);
    json Lm = json::array();
    for (const auto& fam : p.kraus_Lmat) {
        json r = json::array();
        for (const auto& Lin : fam) r.push_back(matrix_to_json(Lin));
        Lm.push_back(std::move(r));
    }
    j["kraus_Lmat"] = std::move(Lm);
    return j.dump(1) + "\n";
}

HPParams params_from_json(const std::string& text)
{
    const json j = parse(text);
    HPParams p;
    p.n = positive_int(j, "n");
    p.d = positive_int(j, "d");
    p.r = positive_int(j, "r");
    p.K = matrix_from_json(field(j, "K"), p.n, p.n, "K");
    p.H = matrix_from_json(field(j, "H"), p.n, p.n, "H");
    p.K_row = matrix_list(field(j, "K_row"), p.d, p.n, p.n, "K_row");
    p.kraus_L = matrix_list(field(j, "kraus_L"), p.r, p.n, p.n, "kraus_L");
    const json& lm = field(j, "kraus_Lmat");
    if (!lm.is_array() || static_cast<int>(lm.size()) != p.r) {
        throw ParseError("kraus_Lmat: expected r rows");
    }
    for (const auto& row : lm) p.kraus_Lmat.push_back(matrix_list(row, p.d, p.n, p.n, "kraus_Lmat"));
    if (!is_hermitian(p.H, 1e-10)) {
        throw ParseError("H is not Hermitian to 1e-10");
    }
    return p;
}

Matrix observable_from_json(const std::string& text)
{
    const json j = parse(text);
    if (j.is_object()) return square_from_json(field(j, "matrix"), "matrix");
    return square_from_json(j, "observable");
}

std::string observable_to_json(const Matrix& X)
{
    json j;
    j["matrix"] = matrix_to_json(X);
    return j.dump(1) + "\n";
}

std::string coherent_to_json(const CoherentFunction& f)
{
    json j;
    j["d"] = f.d();
    j["T"] = f.horizon();
    j["steps"] = f.steps();
    j["values"] = matrix_to_json(f.values());
    return j.dump(1) + "\n";
}

CoherentFunction coherent_from_json(const std::string& text)
{
    const json j = parse(text);
    const int d = positive_int(j, "d");
    const int steps = positive_int(j, "steps");
    const json& T = field(j, "T");
    if (!T.is_number()) throw ParseError("field \"T\" must be a number");
    Matrix values = matrix_from_json(field(j, "values"), steps, d, "values");
    try {
        return {T.get<double>(), std::move(values)};
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

std::string trace_to_csv(const TraceTable& table)
{
    const auto& tr = table.trace;
    if (tr.times.size() != tr.values.size()) {
        throw ShapeError("trace_to_csv: times and values differ in length");
    }
    for (const auto& col : table.extra) {
        if (col.size() != tr.times.size()) throw ShapeError("trace_to_csv: ragged extra column");
    }
    if (table.extra.size() != table.extra_names.size()) {
        throw ShapeError("trace_to_csv: extra names and columns differ in count");
    }
    const Eigen::Index n = tr.values.empty() ? 0 : tr.values.front().rows();
    std::string out = "t";
    for (const char* part : {"re", "im"}) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) {
                out += "," + std::string(part) + "_" + std::to_string(i) + "_" + std::to_string(k);
            }
        }
    }
    for (const auto& name : table.extra_names) out += "," + name;
    out += "\n";

    char buf[32];
    auto put = [&](double x, bool first) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        if (!first) out += ',';
        out += buf;
    };
    for (std::size_t row = 0; row < tr.times.size(); ++row) {
        const Matrix& V = tr.values[row];
        if (V.rows() != n || V.cols() != n) throw ShapeError("trace_to_csv: inconsistent shapes");
        put(tr.times[row], true);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k) put(V(i, k).real(), false);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k) put(V(i, k).imag(), false);
        for (const auto& col : table.extra) put(col[row], false);
        out += '\n';
    }
    return out;
}

TraceTable trace_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trace file is empty");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    if (header.empty() || header[0] != "t") throw ParseError("trace header must start with t");
    // Count re_ columns to recover n.
    std::size_t re_cols = 0;
    while (re_cols + 1 < header.size() && header[re_cols + 1].rfind("re_", 0) == 0) ++re_cols;
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(re_cols))));
    if (n * n != static_cast<Eigen::Index>(re_cols) || header.size() < 1 + 2 * re_cols) {
        throw ParseError("trace header does not describe an n x n trace");
    }
    TraceTable table;
    table.extra_names.assign(header.begin() + 1 + 2 * re_cols, header.end());
    table.extra.resize(table.extra_names.size());

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> cells;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            const double x = std::strtod(p, &end);
            if (end == p) throw ParseError("trace row holds a non-numeric cell");
            cells.push_back(x);
            if (*end == '\0') break;
            if (*end != ',') throw ParseError("trace row holds a malformed cell");
            p = end + 1;
        }
        if (cells.size() != header.size()) throw ParseError("trace row has the wrong column count");
        if (!table.trace.times.empty() && cells[0] < table.trace.times.back()) {
            throw ParseError("trace time column is not monotone");
        }
        Matrix V(n, n);
        std::size_t c = 1;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k) V(i, k) = cplx(cells[c++], 0.0);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k) V(i, k).imag(cells[c++]);
        for (auto& col : table.extra) col.push_back(cells[c++]);
        table.trace.times.push_back(cells[0]);
        table.trace.values.push_back(std::move(V));
    }
    return table;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void save_generator(const std::filesystem::path& path, const FormGenerator& gen)
{
    write_text(path, generator_to_json(gen));
}

FormGenerator load_generator(const std::filesystem::path& path)
{
    return generator_from_json(read_text(path));
}

void save_params(const std::filesystem::path& path, const HPParams& params)
{
    write_text(path, params_to_json(params));
}

HPParams load_params(const std::filesystem::path& path)
{
    return params_from_json(read_text(path));
}

Matrix load_observable(const std::filesystem::path& path)
{
    return observable_from_json(read_text(path));
}

CoherentFunction load_coherent(const std::filesystem::path& path)
{
    return coherent_from_json(read_text(path));
}

void save_trace(const std::filesystem::path& path, const TraceTable& table)
{
    write_text(path, trace_to_csv(table));
}

TraceTable load_trace(const std::filesystem::path& path)
{
    return trace_from_csv(read_text(path));
}

} // namespace qsc
