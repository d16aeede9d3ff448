#include "lcc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lcc::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string matrix_to_csv(const DenseMatrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

DenseMatrix matrix_from_csv(std::string_view text) {
  std::vector<double> data;
  std::size_t rows = 0, cols = 0, lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    std::size_t count = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
        throw IoError("matrix CSV line " + std::to_string(lineno) + ": bad number '" + std::string(field) + "'");
      data.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (rows == 0) cols = count;
    else if (count != cols)
      throw IoError("matrix CSV line " + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                    " values, got " + std::to_string(count));
    ++rows;
  }
  if (rows == 0) throw IoError("matrix CSV is empty");
  return {rows, cols, std::move(data)};
}

std::string decomposition_to_json(const Decomposition& d) {
  json steps = json::array();
  json s_terms = json::array();
  for (const auto& step : d.steps()) {
    s_terms.push_back(step.s_terms());
    json rows = json::array();
    for (const auto& row : step.rows()) {
      json terms = json::array();
      for (const auto& t : row.terms()) {
        if (t.coeff.is_zero())
          terms.push_back(nullptr);
        else
          terms.push_back({t.col, t.coeff.sign(), t.coeff.exponent()});
      }
      rows.push_back(std::move(terms));
    }
    steps.push_back(std::move(rows));
  }
  json doc = {{"n", d.n()}, {"k", d.k()}, {"s_terms", std::move(s_terms)}, {"steps", std::move(steps)}};
  return doc.dump() + "\n";
}

Decomposition decomposition_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("decomposition JSON: ") + e.what());
  }
  try {
    const auto n = doc.at("n").get<std::size_t>();
    const auto k = doc.at("k").get<std::size_t>();
    const auto& steps_json = doc.at("steps");
    if (!steps_json.is_array()) throw IoError("decomposition JSON: 'steps' must be an array");
    std::vector<std::size_t> s_terms;
    if (doc.contains("s_terms")) {
      s_terms = doc.at("s_terms").get<std::vector<std::size_t>>();
      if (s_terms.size() != steps_json.size())
        throw IoError("decomposition JSON: 's_terms' length differs from 'steps'");
    }
    std::vector<WiringMatrix> steps;
    for (std::size_t i = 0; i < steps_json.size(); ++i) {
      std::vector<WiringRow> rows;
      std::size_t widest = 1;
      for (const auto& row_json : steps_json[i]) {
        std::vector<Term> terms;
        for (const auto& term_json : row_json) {
          if (term_json.is_null()) {
            terms.push_back({0, Pow2Coeff::zero()});
            continue;
          }
          if (!term_json.is_array() || term_json.size() != 3)
            throw IoError("decomposition JSON: a term must be [col, sign, exp] or null");
          terms.push_back({term_json[0].get<std::uint32_t>(),
                           Pow2Coeff::make(term_json[1].get<int>(), term_json[2].get<int>())});
        }
        widest = std::max(widest, terms.size());
        rows.emplace_back(std::move(terms));
      }
      steps.emplace_back(std::move(rows), n, s_terms.empty() ? widest : s_terms[i]);
    }
    return {n, k, std::move(steps)};
  } catch (const json::exception& e) {
    throw IoError(std::string("decomposition JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace lcc::io
