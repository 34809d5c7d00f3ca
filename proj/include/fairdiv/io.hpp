#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fairdiv/core.hpp"

namespace fairdiv {

enum class InputFormat { Auto, Points, Matrix };

/// Point CSV: header `id,group,x1,...,xD`, one point per row.
///
/// Group labels are opaque tokens. When every label parses as an integer the
/// groups are ordered numerically, otherwise by first appearance.
Dataset read_points_csv(std::istream& in, const std::string& source = "<stream>");

/// Matrix file: `n`, then a line of n group labels, then n rows of n reals.
/// Point ids are p1..pn. Symmetry and the other metric axioms are enforced.
Dataset read_matrix(std::istream& in, const std::string& source = "<stream>");

/// Auto picks Matrix when the first line is a lone integer.
Dataset read_dataset(const std::string& path, InputFormat format = InputFormat::Auto);

void write_points_csv(std::ostream& out, const Dataset& data);
void write_matrix(std::ostream& out, const Dataset& data);

/// Shortest round-trip decimal form of `x`.
std::string format_real(double x);

/// Splits on `sep` and trims ASCII whitespace around each field.
std::vector<std::string> split_fields(const std::string& line, char sep = ',');

}  // namespace fairdiv
