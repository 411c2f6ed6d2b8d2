#include "gamow/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gamow::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<double>& values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_double(values[i]);
  }
  line += '\n';
  return line;
}

void write_series_csv(std::ostream& out, const Series& series,
                      const std::vector<std::string>& header) {
  series.validate();
  std::vector<std::string> names = header;
  if (names.empty()) {
    names = series.complex_values ? std::vector<std::string>{"x", "re", "im"}
                                  : std::vector<std::string>{"x", "value"};
  }
  const std::size_t columns = series.complex_values ? 3 : 2;
  if (names.size() != columns) {
    throw Error(ErrorCode::InvalidArgument, "CSV header has the wrong number of columns");
  }
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<double> row{series.x[i], series.y[i].real()};
    if (series.complex_values) row.push_back(series.y[i].imag());
    out << csv_row(row);
  }
}

Series read_series_csv(std::istream& in) {
  Series series;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::vector<std::string> fields = split_fields(line);
    std::vector<double> numbers(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_number(fields[i], numbers[i]);
    if (first_content && !numeric) {
      series.label = line;
      first_content = false;
      continue;
    }
    first_content = false;
    const std::string where = "CSV line " + std::to_string(line_no);
    if (!numeric) throw Error(ErrorCode::Parse, where + ": non-numeric field");
    if (fields.size() != 2 && fields.size() != 3) {
      throw Error(ErrorCode::Parse, where + ": expected 2 or 3 columns");
    }
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) throw Error(ErrorCode::Parse, where + ": column count changed");
    series.x.push_back(numbers[0]);
    series.y.emplace_back(numbers[1], columns == 3 ? numbers[2] : 0.0);
  }
  if (series.x.empty()) throw Error(ErrorCode::Parse, "CSV contains no data rows");
  series.complex_values = columns == 3;
  series.validate();
  return series;
}

Series read_series_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_series_csv(in);
}

json complex_to_json(cplx v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_object() && j.contains("re") && j["re"].is_number()) {
    const double im = j.contains("im") ? j.at("im").get<double>() : 0.0;
    return {j["re"].get<double>(), im};
  }
  throw Error(ErrorCode::Parse, "expected a complex number as {\"re\", \"im\"}, [re, im] or a real");
}

json model_to_json(const PoleModel& model) {
  json poles = json::array();
  for (const ModelPole& p : model.poles) {
    json residues = json::array();
    for (const cplx a : p.residues) residues.push_back(complex_to_json(a));
    poles.push_back(json{{"z", complex_to_json(p.z)}, {"order", p.order}, {"residues", residues}});
  }
  return json{{"poles", poles}};
}

PoleModel model_from_json(const json& j) {
  try {
    PoleModel model;
    for (const json& p : j.at("poles")) {
      ModelPole pole;
      pole.z = complex_from_json(p.at("z"));
      for (const json& a : p.at("residues")) pole.residues.push_back(complex_from_json(a));
      pole.order = p.contains("order") ? p.at("order").get<int>()
                                       : static_cast<int>(pole.residues.size());
      model.poles.push_back(std::move(pole));
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("pole model JSON: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, std::string("pole model JSON: ") + e.what());
  }
}

json fit_to_json(const FitResult& fit) {
  json out;
  out["converged"] = fit.converged;
  out["iterations"] = fit.iterations;
  out["residual_rms"] = fit.residual_rms;
  out["gradient_cosine"] = fit.gradient_cosine;
  out["objective"] = fit.objective_history.empty() ? 0.0 : fit.objective_history.back();
  out["model"] = model_to_json(fit.model);
  return out;
}

json selection_to_json(const OrderSelection& selection) {
  json out;
  out["selected_order"] = selection.order;
  out["threshold"] = selection.threshold;
  json candidates = json::array();
  for (const OrderCandidate& c : selection.fits) {
    json entry;
    entry["order"] = c.order;
    entry["succeeded"] = c.succeeded;
    if (c.succeeded) {
      entry["leading_residue_resolved"] = c.leading_residue_resolved;
      entry["fit"] = fit_to_json(c.fit);
    } else {
      entry["failure"] = c.failure;
    }
    candidates.push_back(std::move(entry));
  }
  out["candidates"] = std::move(candidates);
  return out;
}

json operator_to_json(const GamowOperator& op) {
  json rows = json::array();
  for (Eigen::Index k = 0; k < op.matrix().rows(); ++k) {
    json row = json::array();
    for (Eigen::Index l = 0; l < op.matrix().cols(); ++l) row.push_back(complex_to_json(op.matrix()(k, l)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace gamow::io
