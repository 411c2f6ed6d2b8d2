#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamow/density.hpp"
#include "gamow/fitting.hpp"
#include "gamow/lineshape.hpp"

namespace gamow::io {

using json = nlohmann::ordered_json;

/// Shortest form with 17 significant digits, '.' separator, locale independent.
std::string format_double(double v);

/// One CSV line: comma separated, LF terminated.
std::string csv_row(const std::vector<double>& values);

/// Series as CSV: header row, then x, re(y)[, im(y)]. The third column is
/// present only for complex series. Default headers: x,value / x,re,im.
void write_series_csv(std::ostream& out, const Series& series,
                      const std::vector<std::string>& header = {});

/// Reads two- or three-column numeric CSV. A first row with non-numeric
/// fields is taken as the header and becomes the series label. Throws Parse
/// on malformed rows and InvalidArgument if x is not strictly increasing.
Series read_series_csv(std::istream& in);
Series read_series_csv_file(const std::filesystem::path& path);

json complex_to_json(cplx v);
cplx complex_from_json(const json& j);

json model_to_json(const PoleModel& model);
/// {"poles": [{"z": {"re", "im"}, "order": r, "residues": [{"re", "im"}, ...]}]}.
/// "order" may be omitted (taken from the residue count). Throws Parse.
PoleModel model_from_json(const json& j);

json fit_to_json(const FitResult& fit);
json selection_to_json(const OrderSelection& selection);
json operator_to_json(const GamowOperator& op);

std::string read_text_file(const std::filesystem::path& path);
/// Throws Io when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace gamow::io
