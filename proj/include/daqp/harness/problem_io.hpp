#ifndef DAQP__HARNESS__PROBLEM_IO_HPP_
#define DAQP__HARNESS__PROBLEM_IO_HPP_

/**
 * @file
 * @brief Text formats for problems and solutions.
 *
 * Problem file:
 *
 *     DAQP 1
 *     n m me sided
 *     H        (n lines of n numbers)
 *     f        (n numbers)
 *     A        (m lines of n numbers)
 *     b        (m numbers; sided = 1)
 *     bl / bu  (m numbers each; sided = 2)
 *     G        (me lines of n numbers; optional when me = 0)
 *     h        (me numbers; optional when me = 0)
 *
 * A section starts at a line holding only its label. Lines starting with `#` are comments.
 * Numbers are written with 17 significant digits, so write -> parse is exact; `inf` and `-inf`
 * are accepted as bounds.
 *
 * Solution file:
 *
 *     DAQP-SOLUTION 1
 *     status <SolveStatus>
 *     x / lambda / nu   (vectors)
 *     active            (one `<index> upper|lower` per line)
 */

#include <Eigen/Core>

#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "../problem.hpp"
#include "../solver.hpp"

namespace daqp::harness {

namespace detail {

inline std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_vector(std::ostream & os, const Eigen::VectorXd & v)
{
  for (Eigen::Index i = 0; i < v.size(); ++i) { os << (i ? " " : "") << format_double(v(i)); }
  if (v.size() > 0) { os << '\n'; }
}

inline void write_matrix(std::ostream & os, const Eigen::MatrixXd & M)
{
  for (Eigen::Index r = 0; r < M.rows(); ++r) { write_vector(os, M.row(r).transpose()); }
}

inline std::vector<std::string_view> split_ws(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) { ++i; }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') { ++i; }
    if (i > start) { out.push_back(line.substr(start, i - start)); }
  }
  return out;
}

inline double parse_double(std::string_view tok)
{
  double v = 0;
  const char * first = tok.data();
  if (!tok.empty() && tok.front() == '+') { ++first; }
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(tok) + "'");
  }
  return v;
}

inline long parse_count(std::string_view tok)
{
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    throw Error(ErrorCode::ParseError, "not a count: '" + std::string(tok) + "'");
  }
  return v;
}

/// Non-comment, non-blank lines split into tokens.
inline std::vector<std::vector<std::string_view>> tokenize(std::string_view text)
{
  std::vector<std::vector<std::string_view>> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) { end = text.size(); }
    auto toks = split_ws(text.substr(pos, end - pos));
    if (!toks.empty() && toks.front().front() != '#') { lines.push_back(std::move(toks)); }
    pos = end + 1;
  }
  return lines;
}

using Sections = std::map<std::string, std::vector<std::vector<std::string_view>>, std::less<>>;

/// Group lines after the header under the most recent label line.
inline Sections group_sections(
  const std::vector<std::vector<std::string_view>> & lines, std::size_t first, std::initializer_list<std::string_view> labels)
{
  Sections out;
  std::vector<std::vector<std::string_view>> * current = nullptr;
  for (std::size_t k = first; k < lines.size(); ++k) {
    const auto & toks = lines[k];
    if (toks.size() == 1) {
      bool is_label = false;
      for (const auto lbl : labels) { is_label = is_label || toks[0] == lbl; }
      if (is_label) {
        const std::string key(toks[0]);
        if (out.contains(key)) { throw Error(ErrorCode::ParseError, "duplicate section " + key); }
        current = &out[key];
        continue;
      }
    }
    if (!current) { throw Error(ErrorCode::ParseError, "data before the first section label"); }
    current->push_back(toks);
  }
  return out;
}

inline Eigen::MatrixXd read_matrix(const Sections & secs, const std::string & key, Eigen::Index rows, Eigen::Index cols)
{
  const auto & lines = secs.find(key)->second;
  if (static_cast<Eigen::Index>(lines.size()) != rows) {
    throw Error(ErrorCode::DimensionMismatch,
                "section " + key + " has " + std::to_string(lines.size()) + " rows, expected " + std::to_string(rows));
  }
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto & toks = lines[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(toks.size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "section " + key + " row " + std::to_string(r) + " has wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) { out(r, c) = parse_double(toks[static_cast<std::size_t>(c)]); }
  }
  return out;
}

inline Eigen::VectorXd read_vector(const Sections & secs, const std::string & key, std::optional<Eigen::Index> len)
{
  std::vector<double> vals;
  for (const auto & toks : secs.find(key)->second) {
    for (const auto tok : toks) { vals.push_back(parse_double(tok)); }
  }
  if (len && static_cast<Eigen::Index>(vals.size()) != *len) {
    throw Error(ErrorCode::DimensionMismatch,
                "section " + key + " has " + std::to_string(vals.size()) + " entries, expected " + std::to_string(*len));
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline void require(const Sections & secs, const std::string & key)
{
  if (!secs.contains(key)) { throw Error(ErrorCode::MissingSection, "missing section " + key); }
}

}  // namespace detail

inline std::string write_problem(const QProblem & qp)
{
  std::ostringstream os;
  os << "DAQP 1\n" << qp.n() << ' ' << qp.m() << ' ' << qp.me() << ' ' << (qp.two_sided ? 2 : 1) << '\n';
  os << "H\n";
  detail::write_matrix(os, qp.H);
  os << "f\n";
  detail::write_vector(os, qp.f);
  os << "A\n";
  detail::write_matrix(os, qp.A);
  if (qp.two_sided) {
    os << "bl\n";
    detail::write_vector(os, qp.bl);
    os << "bu\n";
    detail::write_vector(os, qp.bu);
  } else {
    os << "b\n";
    detail::write_vector(os, qp.bu);
  }
  if (qp.me() > 0) {
    os << "G\n";
    detail::write_matrix(os, qp.G);
    os << "h\n";
    detail::write_vector(os, qp.h);
  }
  return os.str();
}

/// Throws BadMagic, MissingSection, DimensionMismatch, ParseError or TriviallyInfeasible.
inline QProblem parse_problem(std::string_view text)
{
  const auto lines = detail::tokenize(text);
  if (lines.empty() || lines[0].size() != 2 || lines[0][0] != "DAQP" || lines[0][1] != "1") {
    throw Error(ErrorCode::BadMagic, "expected 'DAQP 1' header");
  }
  if (lines.size() < 2 || lines[1].size() != 4) {
    throw Error(ErrorCode::ParseError, "expected 'n m me sided' line");
  }
  const Eigen::Index n  = detail::parse_count(lines[1][0]);
  const Eigen::Index m  = detail::parse_count(lines[1][1]);
  const Eigen::Index me = detail::parse_count(lines[1][2]);
  const long sided      = detail::parse_count(lines[1][3]);
  if (sided != 1 && sided != 2) { throw Error(ErrorCode::ParseError, "sided must be 1 or 2"); }

  const auto secs = detail::group_sections(lines, 2, {"H", "f", "A", "b", "bl", "bu", "G", "h"});

  QProblem qp;
  qp.two_sided = sided == 2;
  detail::require(secs, "H");
  detail::require(secs, "f");
  qp.H = detail::read_matrix(secs, "H", n, n);
  qp.f = detail::read_vector(secs, "f", n);

  if (m > 0 || secs.contains("A")) {
    detail::require(secs, "A");
    qp.A = detail::read_matrix(secs, "A", m, n);
  } else {
    qp.A.resize(0, n);
  }
  const auto bound = [&](const std::string & key) {
    if (m == 0 && !secs.contains(key)) { return Eigen::VectorXd(); }
    detail::require(secs, key);
    return detail::read_vector(secs, key, m);
  };
  if (qp.two_sided) {
    if (secs.contains("b")) { throw Error(ErrorCode::ParseError, "two-sided problem has a 'b' section"); }
    qp.bl = bound("bl");
    qp.bu = bound("bu");
  } else {
    if (secs.contains("bl") || secs.contains("bu")) {
      throw Error(ErrorCode::ParseError, "one-sided problem has 'bl'/'bu' sections");
    }
    qp.bu = bound("b");
  }

  if (me > 0 || secs.contains("G")) {
    detail::require(secs, "G");
    qp.G = detail::read_matrix(secs, "G", me, n);
  } else {
    qp.G.resize(0, n);
  }
  if (me > 0 || secs.contains("h")) {
    detail::require(secs, "h");
    qp.h = detail::read_vector(secs, "h", me);
  }
  qp.validate();
  return qp;
}

/// Contents of a solution file.
struct SolutionFile
{
  std::string status;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  Eigen::VectorXd nu;
  std::vector<std::pair<Eigen::Index, Side>> active;
};

inline std::string write_solution(const SolveResult & res)
{
  std::ostringstream os;
  os << "DAQP-SOLUTION 1\nstatus " << to_string(res.status) << "\nx\n";
  detail::write_vector(os, res.x);
  os << "lambda\n";
  detail::write_vector(os, res.lambda);
  os << "nu\n";
  detail::write_vector(os, res.nu);
  os << "active\n";
  for (const Eigen::Index i : res.working_set.inequalities()) {
    os << i << ' ' << (res.working_set.side(i) == Side::lower ? "lower" : "upper") << '\n';
  }
  return os.str();
}

inline SolutionFile parse_solution(std::string_view text)
{
  const auto lines = detail::tokenize(text);
  if (lines.empty() || lines[0].size() != 2 || lines[0][0] != "DAQP-SOLUTION" || lines[0][1] != "1") {
    throw Error(ErrorCode::BadMagic, "expected 'DAQP-SOLUTION 1' header");
  }
  std::size_t first = 1;
  SolutionFile out;
  if (lines.size() > 1 && lines[1].size() == 2 && lines[1][0] == "status") {
    out.status = std::string(lines[1][1]);
    first      = 2;
  }
  const auto secs = detail::group_sections(lines, first, {"x", "lambda", "nu", "active"});
  detail::require(secs, "x");
  detail::require(secs, "lambda");
  out.x      = detail::read_vector(secs, "x", std::nullopt);
  out.lambda = detail::read_vector(secs, "lambda", std::nullopt);
  out.nu     = secs.contains("nu") ? detail::read_vector(secs, "nu", std::nullopt) : Eigen::VectorXd();
  if (const auto it = secs.find("active"); it != secs.end()) {
    for (const auto & toks : it->second) {
      if (toks.size() != 2 || (toks[1] != "upper" && toks[1] != "lower")) {
        throw Error(ErrorCode::ParseError, "active entries are '<index> upper|lower'");
      }
      out.active.emplace_back(detail::parse_count(toks[0]), toks[1] == "upper" ? Side::upper : Side::lower);
    }
  }
  return out;
}

/**
 * @brief Warm start from a solution file. Without an `active` section the working set is read
 * off the nonzero multipliers (positive: upper, negative: lower).
 */
inline WarmStart warm_start_from(const SolutionFile & sol, Eigen::Index m, Eigen::Index me)
{
  if (sol.lambda.size() != m) { throw Error(ErrorCode::DimensionMismatch, "solution lambda has wrong length"); }
  WarmStart warm{sol.lambda, WorkingSet(m, me)};
  if (!sol.active.empty()) {
    for (const auto & [i, side] : sol.active) { warm.working_set.add(i, side); }
  } else {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (sol.lambda(i) > 0) { warm.working_set.add(i, Side::upper); }
      if (sol.lambda(i) < 0) { warm.working_set.add(i, Side::lower); }
    }
  }
  return warm;
}

}  // namespace daqp::harness

#endif  // DAQP__HARNESS__PROBLEM_IO_HPP_
