#pragma once

// Plain-text ensemble documents.
//
//   survboost-ensemble v1
//   loss gehan
//   learner tree 2
//   nu 0.1
//   m_stop 2
//   columns 2
//   column age
//   column dose
//   means 0.5 1.25
//   scales 1 0.75
//   coefficients 0 0            (linear learners only)
//   update linear 1 0.25
//   update tree
//     split 0 0.5
//       leaf -1
//       leaf 1
//   end
//
// Reals are written in shortest round-trip form, so reading a document back
// reproduces predictions exactly.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

#include "survboost/engine.hpp"
#include "survboost/errors.hpp"

namespace survboost {

inline std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace detail {

inline void write_tree_node(std::ostream& out, const TreeUpdate& tree, int node, int indent) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
  out << std::string(static_cast<std::size_t>(indent), ' ');
  if (n.is_leaf()) {
    out << "leaf " << format_real(n.value) << '\n';
    return;
  }
  out << "split " << n.feature << ' ' << format_real(n.threshold) << ' '
      << format_real(n.value) << '\n';
  write_tree_node(out, tree, n.left, indent + 2);
  write_tree_node(out, tree, n.right, indent + 2);
}

class DocumentReader {
 public:
  explicit DocumentReader(std::istream& in) : in_(in) {}

  std::istringstream line(const std::string& expected_key) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_no_;
      if (text.find_first_not_of(" \t\r") != std::string::npos) break;
      text.clear();
    }
    std::istringstream fields(text);
    std::string key;
    fields >> key;
    if (key != expected_key)
      fail("expected '" + expected_key + "', found '" + key + "'");
    return fields;
  }

  std::string rest_of_line(const std::string& key) {
    auto fields = line(key);
    std::string rest;
    std::getline(fields, rest);
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    if (!rest.empty() && rest.back() == '\r') rest.pop_back();
    return rest;
  }

  std::string peek_key() {
    const auto pos = in_.tellg();
    const auto saved_line = line_no_;
    std::string text, key;
    while (std::getline(in_, text)) {
      std::istringstream fields(text);
      if (fields >> key) break;
    }
    in_.clear();
    in_.seekg(pos);
    line_no_ = saved_line;
    return key;
  }

  double real(std::istringstream& fields) {
    std::string token;
    if (!(fields >> token)) fail("missing number");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) fail("bad number '" + token + "'");
    return v;
  }

  long integer(std::istringstream& fields) {
    long v = 0;
    if (!(fields >> v)) fail("missing integer");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("ensemble document line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

inline int read_tree_node(DocumentReader& reader, TreeUpdate& tree, int depth) {
  if (depth > 64) reader.fail("tree too deep");
  const std::string key = reader.peek_key();
  const int id = static_cast<int>(tree.nodes.size());
  if (key == "leaf") {
    auto fields = reader.line("leaf");
    tree.nodes.push_back({-1, 0.0, -1, -1, reader.real(fields)});
    return id;
  }
  auto fields = reader.line("split");
  TreeNode node;
  node.feature = static_cast<int>(reader.integer(fields));
  node.threshold = reader.real(fields);
  node.value = reader.real(fields);
  tree.nodes.push_back(node);
  const int left = read_tree_node(reader, tree, depth + 1);
  const int right = read_tree_node(reader, tree, depth + 1);
  tree.nodes[static_cast<std::size_t>(id)].left = left;
  tree.nodes[static_cast<std::size_t>(id)].right = right;
  return id;
}

}  // namespace detail

inline void write_ensemble(std::ostream& out, const Ensemble& ens) {
  out << "survboost-ensemble v1\n";
  out << "loss " << to_string(ens.loss) << '\n';
  out << "learner " << to_string(ens.learner.type);
  if (!ens.learner.is_linear()) out << ' ' << ens.learner.depth();
  out << '\n';
  out << "nu " << format_real(ens.nu) << '\n';
  out << "m_stop " << ens.m_stop() << '\n';
  out << "columns " << ens.dimension() << '\n';
  for (std::size_t j = 0; j < ens.dimension(); ++j)
    out << "column " << (j < ens.column_names.size() ? ens.column_names[j] : "x" + std::to_string(j + 1)) << '\n';
  auto write_vector = [&](const char* key, const Vector& v) {
    out << key;
    for (Eigen::Index j = 0; j < v.size(); ++j) out << ' ' << format_real(v(j));
    out << '\n';
  };
  write_vector("means", ens.standardization.means);
  write_vector("scales", ens.standardization.scales);
  if (ens.learner.is_linear()) write_vector("coefficients", ens.linear_coefficients);
  for (const auto& u : ens.updates) {
    if (const auto* lin = std::get_if<LinearUpdate>(&u)) {
      out << "update linear " << lin->column << ' ' << format_real(lin->slope) << '\n';
    } else {
      out << "update tree\n";
      detail::write_tree_node(out, std::get<TreeUpdate>(u), 0, 2);
    }
  }
  out << "end\n";
}

inline std::string ensemble_to_string(const Ensemble& ens) {
  std::ostringstream out;
  write_ensemble(out, ens);
  return out.str();
}

inline Ensemble read_ensemble(std::istream& in) {
  detail::DocumentReader reader(in);
  {
    auto fields = reader.line("survboost-ensemble");
    std::string version;
    fields >> version;
    if (version != "v1") reader.fail("unsupported version '" + version + "'");
  }
  Ensemble ens;
  {
    auto fields = reader.line("loss");
    std::string name;
    fields >> name;
    try {
      ens.loss = parse_loss(name);
    } catch (const UsageError& e) {
      reader.fail(e.what());
    }
  }
  {
    auto fields = reader.line("learner");
    std::string name;
    int depth = 2;
    fields >> name;
    if (name == "tree") depth = static_cast<int>(reader.integer(fields));
    try {
      ens.learner = parse_learner(name, depth);
    } catch (const UsageError& e) {
      reader.fail(e.what());
    }
  }
  {
    auto fields = reader.line("nu");
    ens.nu = reader.real(fields);
  }
  std::size_t m_stop = 0, d = 0;
  {
    auto fields = reader.line("m_stop");
    m_stop = static_cast<std::size_t>(reader.integer(fields));
  }
  {
    auto fields = reader.line("columns");
    d = static_cast<std::size_t>(reader.integer(fields));
  }
  for (std::size_t j = 0; j < d; ++j) ens.column_names.push_back(reader.rest_of_line("column"));
  auto read_vector = [&](const char* key) {
    auto fields = reader.line(key);
    Vector v(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) v(static_cast<Eigen::Index>(j)) = reader.real(fields);
    return v;
  };
  ens.standardization.means = read_vector("means");
  ens.standardization.scales = read_vector("scales");
  ens.linear_coefficients = ens.learner.is_linear() ? read_vector("coefficients")
                                                    : Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t m = 0; m < m_stop; ++m) {
    auto fields = reader.line("update");
    std::string kind;
    fields >> kind;
    if (kind == "linear") {
      LinearUpdate lin;
      const long column = reader.integer(fields);
      if (column < 0 || static_cast<std::size_t>(column) >= d) reader.fail("column out of range");
      lin.column = static_cast<std::size_t>(column);
      lin.slope = reader.real(fields);
      ens.updates.emplace_back(lin);
    } else if (kind == "tree") {
      TreeUpdate tree;
      detail::read_tree_node(reader, tree, 0);
      for (const auto& node : tree.nodes)
        if (!node.is_leaf() && (node.feature < 0 || static_cast<std::size_t>(node.feature) >= d))
          reader.fail("split feature out of range");
      ens.updates.emplace_back(std::move(tree));
    } else {
      reader.fail("unknown update kind '" + kind + "'");
    }
  }
  reader.line("end");
  return ens;
}

inline Ensemble ensemble_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_ensemble(in);
}

}  // namespace survboost
