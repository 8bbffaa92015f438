#pragma once

#include <memory>
#include <string>
#include <vector>

namespace capillary {

// Arithmetic over named variables: + - * / ^, unary minus, parentheses,
// numbers, pi, and the functions sqrt exp log sin cos tan abs.
// Variables are bound by name at compile time; unknown names are a ConfigError.
class Expr {
 public:
  struct Node;

  static Expr compile(const std::string& text, const std::vector<std::string>& variables);
  double eval(const std::vector<double>& values) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

// Variable names for expressions on the cap of dimension n: xi1..xi{n+1}
// (cap point), x1..x{n+1} (unit normal) and ell.
std::vector<std::string> cap_variables(int n);

}  // namespace capillary
