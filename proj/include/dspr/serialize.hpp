#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dspr/types.hpp"

namespace dspr::io {

// Complex scalar as a single "re+imj" token, e.g. "1.5-0.25j". Printed with
// 17 significant digits so parsing reproduces the double exactly.
std::string complex_token(cplx z);
cplx parse_complex_token(const std::string& token);

std::string real_token(double x);

// Matrix file: one header line "rows cols tag", then `rows` lines of `cols`
// complex tokens separated by single spaces.
void write_matrix_file(const std::string& path, const CMat& m, const std::string& tag);
std::pair<CMat, std::string> read_matrix_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

// Simple CSV split; no quoting (none of our formats need it).
std::vector<std::string> split(const std::string& line, char sep);

} // namespace dspr::io
