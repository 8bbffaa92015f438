#include "capillary/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "capillary/errors.hpp"

namespace capillary {

struct Expr::Node {
  enum Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind = Const;
  double value = 0.0;
  int var = -1;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(const std::vector<double>& v) const {
    switch (kind) {
      case Const: return value;
      case Var: return v[var];
      case Neg: return -a->eval(v);
      case Add: return a->eval(v) + b->eval(v);
      case Sub: return a->eval(v) - b->eval(v);
      case Mul: return a->eval(v) * b->eval(v);
      case Div: return a->eval(v) / b->eval(v);
      case Pow: return std::pow(a->eval(v), b->eval(v));
      case Call: return fn(a->eval(v));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct FnEntry {
  const char* name;
  double (*fn)(double);
};
double f_sqrt(double x) { return std::sqrt(x); }
double f_exp(double x) { return std::exp(x); }
double f_log(double x) { return std::log(x); }
double f_sin(double x) { return std::sin(x); }
double f_cos(double x) { return std::cos(x); }
double f_tan(double x) { return std::tan(x); }
double f_abs(double x) { return std::abs(x); }
constexpr FnEntry kFunctions[] = {{"sqrt", f_sqrt}, {"exp", f_exp}, {"log", f_log}, {"sin", f_sin},
                                  {"cos", f_cos},   {"tan", f_tan}, {"abs", f_abs}};

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := '-' unary | power
// power  := atom ('^' unary)?
// atom   := number | name | name '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  NodePtr parse() {
    NodePtr r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression \"" + s_ + "\" at " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr make(Expr::Node::Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr l = term();
    for (;;) {
      if (eat('+')) l = make(Expr::Node::Add, l, term());
      else if (eat('-')) l = make(Expr::Node::Sub, l, term());
      else return l;
    }
  }
  NodePtr term() {
    NodePtr l = unary();
    for (;;) {
      if (eat('*')) l = make(Expr::Node::Mul, l, unary());
      else if (eat('/')) l = make(Expr::Node::Div, l, unary());
      else return l;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Expr::Node::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Expr::Node::Pow, base, unary());
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      NodePtr r = expr();
      if (!eat(')')) fail("missing ')'");
      return r;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expr::Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (eat('(')) {
        for (const FnEntry& f : kFunctions)
          if (name == f.name) {
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Node::Call;
            n->fn = f.fn;
            n->a = expr();
            if (!eat(')')) fail("missing ')'");
            return n;
          }
        fail("unknown function " + name);
      }
      auto n = std::make_shared<Expr::Node>();
      if (name == "pi") {
        n->value = std::numbers::pi;
        return n;
      }
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) {
          n->kind = Expr::Node::Var;
          n->var = static_cast<int>(i);
          return n;
        }
      fail("unknown variable " + name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::compile(const std::string& text, const std::vector<std::string>& variables) {
  Expr e;
  e.text_ = text;
  e.root_ = Parser(text, variables).parse();
  return e;
}

double Expr::eval(const std::vector<double>& values) const { return root_->eval(values); }

std::vector<std::string> cap_variables(int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n + 1; ++i) v.push_back("xi" + std::to_string(i));
  for (int i = 1; i <= n + 1; ++i) v.push_back("x" + std::to_string(i));
  v.push_back("ell");
  return v;
}

}  // namespace capillary
