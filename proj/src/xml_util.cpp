#include "xml_util.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <boost/property_tree/xml_parser.hpp>

#include "vanet/road_network.hpp"

namespace vanet::xml {

namespace pt = boost::property_tree;
using road::NetworkError;

namespace {

// Line of the `ordinal`-th (1-based) start tag `<tag` in `text`, or 0.
int line_of(std::string_view text, const std::string& tag, int ordinal) {
  int line = 1;
  int seen = 0;
  const std::string open = "<" + tag;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      continue;
    }
    if (text.compare(i, 4, "<!--") == 0) {
      auto end = text.find("-->", i);
      if (end == std::string_view::npos) return 0;
      for (std::size_t j = i; j < end; ++j) line += text[j] == '\n';
      i = end + 2;
      continue;
    }
    if (text.compare(i, open.size(), open) == 0 && i + open.size() < text.size()) {
      const char next = text[i + open.size()];
      if (std::isspace(static_cast<unsigned char>(next)) || next == '/' || next == '>') {
        if (++seen == ordinal) return line;
      }
    }
  }
  return 0;
}

std::string describe(const std::string& doc, int line, const std::string& tag, int ordinal,
                     const pt::ptree& node) {
  std::string where = doc;
  if (line > 0) where += " line " + std::to_string(line);
  where += " (<" + tag + "> #" + std::to_string(ordinal);
  if (auto id = node.get_optional<std::string>("<xmlattr>.id")) where += " '" + *id + "'";
  where += ")";
  return where;
}

struct ParsedDoc {
  std::string text;
  pt::ptree tree;
};

}  // namespace

bool Element::has(const std::string& name) const {
  return node.get_child_optional("<xmlattr>." + name).has_value();
}

std::string Element::attr(const std::string& name) const {
  auto v = node.get_optional<std::string>("<xmlattr>." + name);
  if (!v) throw NetworkError(where + ": missing attribute '" + name + "'");
  return *v;
}

std::string Element::attr_or(const std::string& name, const std::string& fallback) const {
  return node.get<std::string>("<xmlattr>." + name, fallback);
}

double Element::number(const std::string& name) const {
  const std::string raw = attr(name);
  double value = 0.0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw NetworkError(where + ": attribute '" + name + "' is not a number: '" + raw + "'");
  }
  return value;
}

double Element::number_or(const std::string& name, double fallback) const {
  return has(name) ? number(name) : fallback;
}

std::vector<Element> Element::children(const std::string& child_tag) const {
  std::vector<Element> out;
  int k = 0;
  for (const auto& [name, child] : node) {
    if (name != child_tag) continue;
    ++k;
    Element el;
    el.tag = child_tag;
    el.doc = doc;
    el.node = child;
    el.where = where + " <" + child_tag + "> #" + std::to_string(k);
    out.push_back(std::move(el));
  }
  return out;
}

std::vector<Element> elements(std::string_view text, const std::string& root, const std::string& tag,
                              const std::string& doc_name) {
  std::vector<Element> out;
  bool blank = true;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      blank = false;
      break;
    }
  }
  if (blank) return out;

  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw NetworkError(doc_name + " line " + std::to_string(e.line()) + ": malformed XML: " +
                       e.message());
  }
  auto root_node = tree.get_child_optional(root);
  if (!root_node) throw NetworkError(doc_name + ": missing root element <" + root + ">");

  int ordinal = 0;
  for (const auto& [name, child] : *root_node) {
    if (name != tag) continue;
    ++ordinal;
    Element el;
    el.tag = tag;
    el.doc = doc_name;
    el.node = child;
    el.where = describe(doc_name, line_of(text, tag, ordinal), tag, ordinal, child);
    out.push_back(std::move(el));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NetworkError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NetworkError("cannot write '" + path + "'");
  out << text;
}

}  // namespace vanet::xml
