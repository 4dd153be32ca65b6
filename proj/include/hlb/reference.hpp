#pragma once

#include <optional>

namespace hlb::reference {

/// Published reference values the tables are compared against: best-found
/// norms (rounded up at the printed precision) and the bounds they imply.
struct NormTableRow {
  int m;
  double norm;
  double bound;
};

/// Inductive family T_m on l_{2m}, m = 2..9.
inline constexpr NormTableRow kLittlewoodTable[] = {
    {2, 1.74, 1.149},  {3, 3.29, 1.215},  {4, 6.40, 1.250},   {5, 12.60, 1.269},
    {6, 25.00, 1.280}, {7, 49.47, 1.293}, {8, 98.36, 1.301},  {9, 195.81, 1.307},
};

/// Shifted-product family on l_{2m}, m = 4, 8, 16.
inline constexpr NormTableRow kTildeTable[] = {
    {4, 6.20, 1.290},
    {8, 91.48, 1.399},
    {16, 22137.70, 1.480},
};

inline std::optional<NormTableRow> littlewood_row(int m) {
  for (const auto& row : kLittlewoodTable)
    if (row.m == m) return row;
  return std::nullopt;
}

inline std::optional<NormTableRow> tilde_row(int m) {
  for (const auto& row : kTildeTable)
    if (row.m == m) return row;
  return std::nullopt;
}

}  // namespace hlb::reference
