// Copyright (c) 2026 The Datafarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "df/schemac.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "df/error.hpp"

namespace df::schemac {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_known_scalar(std::string_view key) {
  for (const char* k : kScalarKeys)
    if (key == k) return true;
  return false;
}

bool is_known_block(std::string_view key) {
  for (const char* k : kBlockKeys)
    if (key == k) return true;
  return false;
}

void warn(std::vector<Diagnostic>& diags, int line, std::string msg) {
  diags.push_back({Diagnostic::Severity::kWarning, line, std::move(msg)});
}

void error(std::vector<Diagnostic>& diags, int line, std::string msg) {
  diags.push_back({Diagnostic::Severity::kError, line, std::move(msg)});
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = i + 1;
    }
  }
  if (!lines.empty() && lines.back().empty() && !text.empty() && text.back() == '\n')
    lines.pop_back();
  return lines;
}

}  // namespace

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::kError;
  });
}

std::string format_diagnostic(std::string_view source_name, const Diagnostic& d) {
  std::string out(source_name);
  out += ':';
  out += std::to_string(d.line);
  out += ": ";
  out += d.severity == Diagnostic::Severity::kError ? "error" : "warning";
  out += ": ";
  out += d.message;
  return out;
}

const SchemaDef::Scalar* SchemaDef::scalar(std::string_view name) const {
  for (const auto& s : scalars)
    if (s.name == name) return &s;
  return nullptr;
}

const SchemaDef::Block* SchemaDef::block(std::string_view name) const {
  for (const auto& b : blocks)
    if (b.name == name) return &b;
  return nullptr;
}

SchemaDef parse(std::string_view text, std::string source_name, std::vector<Diagnostic>& diags) {
  SchemaDef schema;
  schema.source_name = std::move(source_name);

  SchemaDef::Block* open_block = nullptr;
  int open_block_line = 0;

  auto lines = split_lines(text);
  for (size_t li = 0; li < lines.size(); ++li) {
    int line_no = static_cast<int>(li) + 1;
    std::string_view raw = lines[li];

    if (open_block) {
      if (trim(raw) == "..") {
        open_block = nullptr;
        continue;
      }
      open_block->lines.emplace_back(raw);
      open_block->source_lines.push_back(line_no);
      continue;
    }

    std::string_view stripped = trim(raw);
    if (stripped.empty() || stripped.front() == '#') continue;

    if (stripped.substr(0, 3) != "set" ||
        (stripped.size() > 3 && stripped[3] != ' ' && stripped[3] != '\t')) {
      error(diags, line_no, "MalformedDirective: expected 'set <key> ...', got '" +
                                std::string(stripped.substr(0, 32)) + "'");
      continue;
    }
    std::string_view rest = trim(stripped.substr(3));
    if (rest.empty()) {
      error(diags, line_no, "MalformedDirective: 'set' without a key");
      continue;
    }
    size_t key_end = rest.find_first_of(" \t");
    std::string key(rest.substr(0, key_end));
    std::string_view value =
        key_end == std::string_view::npos ? std::string_view{} : trim(rest.substr(key_end));

    if (!value.empty()) {
      if (!is_known_scalar(key))
        warn(diags, line_no, "unknown key '" + key + "' retained");
      bool replaced = false;
      for (auto& s : schema.scalars) {
        if (s.name == key) {
          s.value = std::string(value);  // later set overrides
          replaced = true;
          break;
        }
      }
      if (!replaced) schema.scalars.push_back({key, std::string(value), line_no});
    } else {
      if (!is_known_block(key))
        warn(diags, line_no, "unknown key '" + key + "' retained");
      SchemaDef::Block* target = nullptr;
      for (auto& b : schema.blocks)
        if (b.name == key) target = &b;  // later set appends
      if (!target) {
        schema.blocks.push_back({key, {}, {}, line_no});
        target = &schema.blocks.back();
      }
      open_block = target;
      open_block_line = line_no;
    }
  }

  if (open_block)
    error(diags, open_block_line,
          "UnterminatedBlock: block '" + open_block->name + "' has no closing '..'");
  return schema;
}

std::string print(const SchemaDef& schema) {
  std::string out;
  for (const auto& s : schema.scalars) {
    out += "set ";
    out += s.name;
    out += ' ';
    out += s.value;
    out += '\n';
  }
  for (const auto& b : schema.blocks) {
    out += "set ";
    out += b.name;
    out += '\n';
    for (const auto& line : b.lines) {
      out += line;
      out += '\n';
    }
    out += "..\n";
  }
  return out;
}

MacroTable macro_table(const SchemaDef& schema, const MacroTable& extra) {
  MacroTable table;
  table["float"] = "float";
  table["make_transient"] = "MakeTransient";
  if (const auto* cn = schema.scalar("class_name")) table["class_root"] = cn->value + "Root";
  for (const auto& s : schema.scalars) table[s.name] = s.value;
  for (const auto& [k, v] : extra) table[k] = v;
  return table;
}

std::string expand(std::string_view text, const MacroTable& table, std::vector<Diagnostic>& diags,
                   int line) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '@') {
      out.push_back(text[i++]);
      continue;
    }
    size_t j = text.find('@', i + 1);
    if (j == std::string_view::npos) {
      out += text.substr(i);  // lone '@' tail is plain text
      break;
    }
    std::string name(text.substr(i + 1, j - i - 1));
    if (!is_identifier(name)) {
      warn(diags, line, name.empty() ? "empty macro reference '@@'"
                                     : "malformed macro reference '@" + name + "@'");
      out.push_back('@');
      i += 1;  // the '@' at j may still open a real reference
      continue;
    }
    auto it = table.find(name);
    if (it == table.end()) {
      warn(diags, line, "unresolved macro '@" + name + "@'");
      out += text.substr(i, j - i + 1);  // left intact
    } else {
      out += it->second;  // replacement is not re-scanned
    }
    i = j + 1;
  }
  return out;
}

std::vector<MemberField> member_fields(const SchemaDef& schema) {
  std::vector<MemberField> fields;
  const auto* member = schema.block("member");
  if (!member) return fields;
  for (const auto& raw : member->lines) {
    std::string_view line = trim(raw);
    if (line.empty() || line.substr(0, 2) == "//") continue;
    if (!line.empty() && line.back() == ';') line = trim(line.substr(0, line.size() - 1));
    auto sp = line.find_last_of(" \t");
    if (sp == std::string_view::npos) continue;
    MemberField f;
    f.name = std::string(trim(line.substr(sp)));
    std::string_view type = trim(line.substr(0, sp));
    if (type.size() > 2 && type.front() == '@' && type.back() == '@' &&
        is_identifier(type.substr(1, type.size() - 2))) {
      f.type = std::string(type.substr(1, type.size() - 2));
    } else {
      f.type = std::string(type);
    }
    if (!f.name.empty()) fields.push_back(std::move(f));
  }
  return fields;
}

std::vector<Diagnostic> validate(const SchemaDef& schema, const MacroTable& extra) {
  std::vector<Diagnostic> diags;

  const auto* class_name = schema.scalar("class_name");
  if (!class_name || class_name->value.empty()) {
    error(diags, 0, "class_name missing");
  } else if (!is_identifier(class_name->value)) {
    error(diags, class_name->line,
          "class_name '" + class_name->value + "' is not a valid identifier");
  }
  if (!schema.scalar("collection_class")) error(diags, 0, "collection_class missing");
  const auto* member = schema.block("member");
  if (!member || member->lines.empty()) error(diags, 0, "member block missing");

  for (const auto& s : schema.scalars)
    if (!is_known_scalar(s.name)) warn(diags, s.line, "unknown key '" + s.name + "'");
  for (const auto& b : schema.blocks)
    if (!is_known_block(b.name)) warn(diags, b.line, "unknown key '" + b.name + "'");

  // Dry-run expansion over every block line to surface unresolved macros.
  MacroTable table = macro_table(schema, extra);
  for (const auto& b : schema.blocks) {
    for (size_t i = 0; i < b.lines.size(); ++i) {
      int line_no = i < b.source_lines.size() ? b.source_lines[i] : b.line;
      expand(b.lines[i], table, diags, line_no);
    }
  }
  return diags;
}

std::string descriptor(const SchemaDef& schema) {
  std::string out = "schema ";
  const auto* cn = schema.scalar("class_name");
  out += cn ? cn->value : "";
  out += '\n';

  // Known scalars in canonical order, then unknown ones in appearance order.
  for (const char* key : kScalarKeys)
    if (const auto* s = schema.scalar(key)) {
      out += "scalar ";
      out += key;
      out += ' ';
      out += s->value;
      out += '\n';
    }
  for (const auto& s : schema.scalars)
    if (!is_known_scalar(s.name)) {
      out += "scalar ";
      out += s.name;
      out += ' ';
      out += s.value;
      out += '\n';
    }

  for (const char* key : kBlockKeys)
    if (const auto* b = schema.block(key)) {
      out += "block ";
      out += key;
      out += ' ';
      out += std::to_string(b->lines.size());
      out += '\n';
    }
  for (const auto& b : schema.blocks)
    if (!is_known_block(b.name)) {
      out += "block ";
      out += b.name;
      out += ' ';
      out += std::to_string(b.lines.size());
      out += '\n';
    }

  for (const auto& f : member_fields(schema)) {
    out += "field ";
    out += f.name;
    out += ' ';
    out += f.type;
    out += '\n';
  }
  return out;
}

CompileResult compile(const fs::path& schema_file, const std::vector<fs::path>& template_files,
                      const fs::path& output_dir, const MacroTable& defines) {
  CompileResult result;

  std::ifstream in(schema_file);
  if (!in.is_open())
    fail(ErrorCode::kIoFailure, "cannot open schema file " + schema_file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string schema_text = buf.str();

  SchemaDef schema = parse(schema_text, schema_file.filename().string(), result.diagnostics);
  auto validation = validate(schema, defines);
  result.diagnostics.insert(result.diagnostics.end(), validation.begin(), validation.end());
  if (has_errors(result.diagnostics)) {
    result.ok = false;
    return result;  // nothing written
  }

  // Read every template before writing anything.
  struct Render {
    fs::path out_path;
    std::string text;
  };
  std::vector<Render> renders;
  MacroTable table = macro_table(schema, defines);
  const std::string class_name = schema.scalar("class_name")->value;
  for (const auto& tpl : template_files) {
    std::ifstream tin(tpl);
    if (!tin.is_open()) fail(ErrorCode::kTemplateNotFound, "cannot open template " + tpl.string());
    std::stringstream tbuf;
    tbuf << tin.rdbuf();
    const std::string tpl_text = tbuf.str();
    std::string rendered;
    auto tpl_lines = split_lines(tpl_text);
    for (size_t i = 0; i < tpl_lines.size(); ++i) {
      std::vector<Diagnostic> tpl_diags;
      rendered += expand(tpl_lines[i], table, tpl_diags, static_cast<int>(i) + 1);
      rendered += '\n';
      for (auto& d : tpl_diags) {
        d.message = tpl.filename().string() + ": " + d.message;
        result.diagnostics.push_back(std::move(d));
      }
    }
    renders.push_back({output_dir / (tpl.stem().string() + "." + class_name + ".out"),
                       std::move(rendered)});
  }

  std::error_code ec;
  fs::create_directories(output_dir, ec);

  fs::path desc_path = output_dir / (class_name + ".schema");
  std::ofstream desc(desc_path, std::ios::binary);
  if (!desc.is_open()) fail(ErrorCode::kIoFailure, "cannot write " + desc_path.string());
  desc << descriptor(schema);
  desc.close();
  result.written.push_back(desc_path);

  for (const auto& r : renders) {
    std::ofstream out(r.out_path, std::ios::binary);
    if (!out.is_open()) fail(ErrorCode::kIoFailure, "cannot write " + r.out_path.string());
    out << r.text;
    out.close();
    result.written.push_back(r.out_path);
  }

  result.ok = true;
  return result;
}

}  // namespace df::schemac
