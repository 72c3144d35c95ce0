// Copyright 2026 The robosetup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robosetup/xml.hpp"

#include <expat.h>

#include "robosetup/error.hpp"

namespace robosetup::xml {

const std::string* Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view tag) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c->name == tag) out.push_back(c.get());
  }
  return out;
}

const Element* Element::first_child(std::string_view tag) const {
  for (const auto& c : children) {
    if (c->name == tag) return c.get();
  }
  return nullptr;
}

namespace {

struct ParseState {
  XML_Parser parser = nullptr;
  std::unique_ptr<Element> root;
  std::vector<Element*> stack;
};

void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(data);
  auto el = std::make_unique<Element>();
  el->name = name;
  el->line = static_cast<int>(XML_GetCurrentLineNumber(st->parser));
  for (int i = 0; attrs[i] != nullptr; i += 2) el->attributes.emplace_back(attrs[i], attrs[i + 1]);
  Element* raw = el.get();
  if (st->stack.empty()) {
    st->root = std::move(el);
  } else {
    st->stack.back()->children.push_back(std::move(el));
  }
  st->stack.push_back(raw);
}

void on_end(void* data, const XML_Char*) {
  static_cast<ParseState*>(data)->stack.pop_back();
}

}  // namespace

std::unique_ptr<Element> parse(std::string_view text) {
  ParseState st;
  st.parser = XML_ParserCreate("UTF-8");
  if (st.parser == nullptr) throw Error(ErrorCode::kInternal, "cannot allocate XML parser");
  XML_SetUserData(st.parser, &st);
  XML_SetElementHandler(st.parser, on_start, on_end);
  const auto status = XML_Parse(st.parser, text.data(), static_cast<int>(text.size()), XML_TRUE);
  if (status != XML_STATUS_OK) {
    const std::string msg = std::string("malformed XML at line ") +
                            std::to_string(XML_GetCurrentLineNumber(st.parser)) + ": " +
                            XML_ErrorString(XML_GetErrorCode(st.parser));
    XML_ParserFree(st.parser);
    throw Error(ErrorCode::kParse, msg);
  }
  XML_ParserFree(st.parser);
  if (!st.root) throw Error(ErrorCode::kParse, "empty XML document");
  return std::move(st.root);
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

Writer::Writer() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void Writer::write_start(std::string_view tag,
                         const Attrs& attrs) {
  out_.append(2 * stack_.size(), ' ');
  out_ += '<';
  out_ += tag;
  for (const auto& [k, v] : attrs) {
    out_ += ' ';
    out_ += k;
    out_ += "=\"";
    out_ += escape(v);
    out_ += '"';
  }
}

Writer& Writer::open(std::string_view tag,
                     const Attrs& attrs) {
  write_start(tag, attrs);
  out_ += ">\n";
  stack_.emplace_back(tag);
  return *this;
}

Writer& Writer::empty(std::string_view tag,
                      const Attrs& attrs) {
  write_start(tag, attrs);
  out_ += "/>\n";
  return *this;
}

Writer& Writer::close() {
  const std::string tag = stack_.back();
  stack_.pop_back();
  out_.append(2 * stack_.size(), ' ');
  out_ += "</" + tag + ">\n";
  return *this;
}

}  // namespace robosetup::xml
