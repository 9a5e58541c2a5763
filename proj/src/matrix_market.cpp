#include "sylkrylov/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sylkrylov/errors.hpp"

namespace sylkrylov {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct Header {
    bool coordinate = false;  // else array
    bool symmetric = false;   // else general
};

Header parse_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix")
        throw ParseError(path + ": malformed MatrixMarket header: " + line);
    Header h;
    const std::string fmt = lower(format);
    if (fmt == "coordinate")
        h.coordinate = true;
    else if (fmt == "array")
        h.coordinate = false;
    else
        throw ParseError(path + ": unsupported format '" + format + "'");
    if (lower(field) != "real")
        throw ParseError(path + ": unsupported field '" + field + "' (real required)");
    const std::string sym = lower(symmetry);
    if (sym == "general")
        h.symmetric = false;
    else if (sym == "symmetric")
        h.symmetric = true;
    else
        throw ParseError(path + ": unsupported symmetry '" + symmetry + "'");
    if (!h.coordinate && h.symmetric)
        throw ParseError(path + ": array symmetric storage not supported");
    return h;
}

/// Next non-comment, non-blank line.
bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        size_t pos = line.find_first_not_of(" \t\r\n");
        if (pos == std::string::npos) continue;
        if (line[pos] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace

MatrixVariant read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    const Header h = parse_header(in, path);

    std::string line;
    if (!next_data_line(in, line)) throw ParseError(path + ": missing size line");
    std::istringstream ss(line);

    if (h.coordinate) {
        long long nr = -1, nc = -1, nnz = -1;
        ss >> nr >> nc >> nnz;
        if (ss.fail() || nr < 0 || nc < 0 || nnz < 0)
            throw ParseError(path + ": malformed coordinate size line: " + line);
        std::vector<index_t> rows, cols;
        std::vector<double> vals;
        rows.reserve(static_cast<size_t>(nnz));
        cols.reserve(static_cast<size_t>(nnz));
        vals.reserve(static_cast<size_t>(nnz));
        for (long long k = 0; k < nnz; ++k) {
            if (!next_data_line(in, line)) throw ParseError(path + ": unexpected end of entries");
            std::istringstream es(line);
            long long i, j;
            double v;
            es >> i >> j >> v;
            if (es.fail()) throw ParseError(path + ": malformed entry: " + line);
            if (i < 1 || i > nr || j < 1 || j > nc)
                throw ParseError(path + ": index out of bounds: " + line);
            rows.push_back(static_cast<index_t>(i - 1));
            cols.push_back(static_cast<index_t>(j - 1));
            vals.push_back(v);
            if (h.symmetric && i != j) {
                rows.push_back(static_cast<index_t>(j - 1));
                cols.push_back(static_cast<index_t>(i - 1));
                vals.push_back(v);
            }
        }
        return SparseMatrix::from_triplets(static_cast<index_t>(nr), static_cast<index_t>(nc),
                                           std::move(rows), std::move(cols), std::move(vals));
    }

    long long nr = -1, nc = -1;
    ss >> nr >> nc;
    if (ss.fail() || nr < 0 || nc < 0) throw ParseError(path + ": malformed array size line: " + line);
    DenseMatrix m(static_cast<index_t>(nr), static_cast<index_t>(nc));
    for (long long j = 0; j < nc; ++j) {
        for (long long i = 0; i < nr; ++i) {
            if (!next_data_line(in, line)) throw ParseError(path + ": unexpected end of entries");
            std::istringstream es(line);
            double v;
            es >> v;
            if (es.fail()) throw ParseError(path + ": malformed value: " + line);
            m(static_cast<index_t>(i), static_cast<index_t>(j)) = v;
        }
    }
    return m;
}

SparseMatrix read_matrix_market_sparse(const std::string& path) {
    MatrixVariant v = read_matrix_market(path);
    if (auto* s = std::get_if<SparseMatrix>(&v)) return std::move(*s);
    throw ParseError(path + ": expected a coordinate (sparse) matrix");
}

DenseMatrix read_matrix_market_dense(const std::string& path) {
    MatrixVariant v = read_matrix_market(path);
    if (auto* d = std::get_if<DenseMatrix>(&v)) return std::move(*d);
    throw ParseError(path + ": expected an array (dense) matrix");
}

namespace {

void write_value(std::ofstream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

void write_matrix_market(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
    for (index_t i = 0; i < m.rows(); ++i) {
        for (index_t k = m.row_ptr()[static_cast<size_t>(i)]; k < m.row_ptr()[static_cast<size_t>(i) + 1]; ++k) {
            out << (i + 1) << " " << (m.col_idx()[static_cast<size_t>(k)] + 1) << " ";
            write_value(out, m.values()[static_cast<size_t>(k)]);
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_matrix_market(const DenseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << " " << m.cols() << "\n";
    for (index_t j = 0; j < m.cols(); ++j) {
        for (index_t i = 0; i < m.rows(); ++i) {
            write_value(out, m(i, j));
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace sylkrylov
