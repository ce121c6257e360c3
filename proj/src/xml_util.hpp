#pragma once

// Thin layer over Boost.PropertyTree for the flat XML subsets used by the
// network, route and turn documents. Errors are reported as NetworkError with
// "<document> line N" locations.

#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace vanet::xml {

struct Element {
  std::string tag;
  std::string where;  // "<doc> line N (<tag> #k 'id')"
  std::string doc;
  boost::property_tree::ptree node;

  bool has(const std::string& name) const;
  std::string attr(const std::string& name) const;
  std::string attr_or(const std::string& name, const std::string& fallback) const;
  double number(const std::string& name) const;
  double number_or(const std::string& name, double fallback) const;
  std::vector<Element> children(const std::string& child_tag) const;
};

/// Children named `tag` of the root element `root`. An all-whitespace document
/// yields no elements.
std::vector<Element> elements(std::string_view text, const std::string& root, const std::string& tag,
                              const std::string& doc_name);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace vanet::xml
