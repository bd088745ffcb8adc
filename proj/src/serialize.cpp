#include "dspr/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dspr::io {

std::string real_token(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string complex_token(cplx z) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
    return buf;
}

cplx parse_complex_token(const std::string& token) {
    const char* s = token.c_str();
    char* end = nullptr;
    const double re = std::strtod(s, &end);
    if (end == s || (*end != '+' && *end != '-'))
        throw IoError("malformed complex token: " + token);
    const char* imstart = end;
    const double im = std::strtod(imstart, &end);
    if (end == imstart || *end != 'j' || *(end + 1) != '\0')
        throw IoError("malformed complex token: " + token);
    return {re, im};
}

void write_matrix_file(const std::string& path, const CMat& m, const std::string& tag) {
    std::ostringstream out;
    out << m.rows() << ' ' << m.cols() << ' ' << tag << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ' ';
            out << complex_token(m(i, j));
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

std::pair<CMat, std::string> read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Eigen::Index rows = 0, cols = 0;
    std::string tag;
    std::string header;
    if (!std::getline(in, header)) throw IoError("empty matrix file " + path);
    {
        std::istringstream hs(header);
        if (!(hs >> rows >> cols >> tag) || rows < 0 || cols < 0)
            throw IoError("malformed matrix header in " + path);
    }
    CMat m(rows, cols);
    std::string token;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(in >> token)) throw IoError("truncated matrix file " + path);
            m(i, j) = parse_complex_token(token);
        }
    }
    return {std::move(m), std::move(tag)};
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << contents;
    if (!out) throw IoError("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace dspr::io
