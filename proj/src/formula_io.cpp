#include "wstl/formula_io.hpp"

#include "wstl/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <vector>

namespace wstl {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void append_vector(std::string& out, const std::vector<double>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i)
      out += ',';
    out += format_real(values[i]);
  }
  out += ']';
}

void print(const FormulaNode& node, std::string& out) {
  out += '(';
  out += to_string(node.kind);
  switch (node.kind) {
  case NodeKind::True:
    break;
  case NodeKind::Atom: {
    const Predicate& p = *node.predicate;
    out += " a=";
    append_vector(out, p.direction);
    out += " u=" + format_real(p.threshold);
    if (p.family != PredicateFamily::LinearHalfspace)
      out += " family=" + std::string(to_string(p.family)) + " feature=" + std::to_string(p.feature);
    if (p.view != 0)
      out += " view=" + std::to_string(p.view);
    if (p.offset != 0)
      out += " offset=" + std::to_string(p.offset);
    break;
  }
  case NodeKind::Not:
    break;
  case NodeKind::And:
  case NodeKind::Or:
  case NodeKind::Eventually:
  case NodeKind::Always:
    out += " w=";
    append_vector(out, node.weights);
    out += " beta=" + format_real(node.bias);
    if (node.is_temporal())
      out += " window=[" + std::to_string(node.window_lo) + "," + std::to_string(node.window_hi) + "]";
    break;
  }
  for (const auto& child : node.children) {
    out += ' ';
    print(child, out);
  }
  out += ')';
}

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  FormulaNode parse_all() {
    FormulaNode node = parse_node();
    skip_space();
    if (pos_ != text_.size())
      error("trailing characters");
    return node;
  }

private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::Parse, "formula parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c))
      error(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_)
      error("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  std::string_view scalar_token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_)
      error("expected value");
    return text_.substr(start, pos_ - start);
  }

  double real() {
    auto tok = scalar_token();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      error("bad real '" + std::string(tok) + "'");
    return value;
  }

  std::size_t count() {
    auto tok = scalar_token();
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      error("bad index '" + std::string(tok) + "'");
    return value;
  }

  std::vector<double> real_list() {
    expect('[');
    std::vector<double> values;
    if (peek(']')) {
      ++pos_;
      return values;
    }
    for (;;) {
      values.push_back(real());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect(']');
      return values;
    }
  }

  FormulaNode parse_node() {
    expect('(');
    const auto head = word();
    FormulaNode node;
    if (head == "true") {
      node.kind = NodeKind::True;
    } else if (head == "atom") {
      node.kind = NodeKind::Atom;
      node.predicate.emplace();
    } else if (head == "not") {
      node.kind = NodeKind::Not;
    } else if (head == "and") {
      node.kind = NodeKind::And;
    } else if (head == "or") {
      node.kind = NodeKind::Or;
    } else if (head == "eventually") {
      node.kind = NodeKind::Eventually;
    } else if (head == "always") {
      node.kind = NodeKind::Always;
    } else {
      error("unknown operator '" + std::string(head) + "'");
    }
    bool have_weights = false, have_beta = false, have_window = false, have_a = false, have_u = false;
    while (!peek(')') && !peek('(')) {
      const auto key = word();
      expect('=');
      if (node.kind == NodeKind::Atom) {
        Predicate& p = *node.predicate;
        if (key == "a") {
          p.direction = real_list();
          have_a = true;
        } else if (key == "u") {
          p.threshold = real();
          have_u = true;
        } else if (key == "family") {
          p.family = predicate_family_from_string(word());
        } else if (key == "feature") {
          p.feature = count();
        } else if (key == "view") {
          p.view = count();
        } else if (key == "offset") {
          p.offset = count();
        } else {
          error("unknown atom attribute '" + std::string(key) + "'");
        }
      } else if (node.is_weighted() && key == "w") {
        node.weights = real_list();
        have_weights = true;
      } else if (node.is_weighted() && key == "beta") {
        node.bias = real();
        have_beta = true;
      } else if (node.is_temporal() && key == "window") {
        expect('[');
        node.window_lo = count();
        expect(',');
        node.window_hi = count();
        expect(']');
        have_window = true;
      } else {
        error("unexpected attribute '" + std::string(key) + "'");
      }
    }
    if (node.kind == NodeKind::Atom && !(have_a && have_u))
      error("atom needs a= and u=");
    if (node.is_weighted() && !(have_weights && have_beta))
      error("weighted operator needs w= and beta=");
    if (node.is_temporal() && !have_window)
      error("temporal operator needs window=");
    while (peek('('))
      node.children.push_back(parse_node());
    expect(')');
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

std::string to_canonical(const FormulaNode& node) {
  std::string out;
  print(node, out);
  return out;
}

FormulaNode parse_canonical(std::string_view text) {
  FormulaNode node = Parser(text).parse_all();
  try {
    validate(node);
  } catch (const Error& e) {
    fail(ErrorCode::Parse, std::string("parsed formula is malformed: ") + e.what());
  }
  return node;
}

} // namespace wstl
