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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace df::schemac {

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  int line = 0;
  std::string message;
};

bool has_errors(const std::vector<Diagnostic>& diags);
std::string format_diagnostic(std::string_view source_name, const Diagnostic& diag);

// A parsed property-definition document.
//
//   set <key> <value>     scalar; later set of the same key overrides
//   set <key>             opens a block collected verbatim until a '..' line;
//                         later set of the same key appends
//
// Blank lines and '#' comments are ignored outside blocks. Unknown keys are
// retained and only warned about.
struct SchemaDef {
  struct Scalar {
    std::string name;
    std::string value;
    int line = 0;
    friend bool operator==(const Scalar& a, const Scalar& b) {
      return a.name == b.name && a.value == b.value;
    }
  };
  struct Block {
    std::string name;
    std::vector<std::string> lines;
    std::vector<int> source_lines;  // parallel to lines; not part of identity
    int line = 0;
    friend bool operator==(const Block& a, const Block& b) {
      return a.name == b.name && a.lines == b.lines;
    }
  };

  std::vector<Scalar> scalars;  // first-definition order
  std::vector<Block> blocks;    // first-definition order
  std::string source_name;

  const Scalar* scalar(std::string_view name) const;
  const Block* block(std::string_view name) const;

  friend bool operator==(const SchemaDef& a, const SchemaDef& b) {
    return a.scalars == b.scalars && a.blocks == b.blocks;
  }
};

inline constexpr const char* kScalarKeys[] = {
    "class_name", "collection_class", "collection_base_class",
    "sdet_name",  "array_io_base",    "catalog",
};
inline constexpr const char* kBlockKeys[] = {
    "global_declaration", "add_header_src", "member", "constructor", "method",
};

SchemaDef parse(std::string_view text, std::string source_name, std::vector<Diagnostic>& diags);

// Prints a SchemaDef back to `.rootio` text; parse(print(s)) == s.
std::string print(const SchemaDef& schema);

// Macro bindings: @float@, @class_root@ (class_name + "Root"),
// @make_transient@ ("MakeTransient"), one binding per scalar key, then
// caller-supplied definitions override everything.
using MacroTable = std::map<std::string, std::string>;
MacroTable macro_table(const SchemaDef& schema, const MacroTable& extra = {});

// One left-to-right pass; replacements are not re-scanned; unresolved
// references stay intact and produce warnings against `line`.
std::string expand(std::string_view text, const MacroTable& table, std::vector<Diagnostic>& diags,
                   int line = 0);

std::vector<Diagnostic> validate(const SchemaDef& schema, const MacroTable& extra = {});

struct MemberField {
  std::string name;
  std::string type;  // macro name when the type was @x@, literal text otherwise
};
std::vector<MemberField> member_fields(const SchemaDef& schema);

// Canonical descriptor text: byte-stable for a given schema.
std::string descriptor(const SchemaDef& schema);

struct CompileResult {
  bool ok = false;
  std::vector<std::filesystem::path> written;
  std::vector<Diagnostic> diagnostics;
};

// Parses and validates schema_file; on success writes
// <class_name>.schema plus one <template-stem>.<class_name>.out per
// template under output_dir. Writes nothing when validation fails.
CompileResult compile(const std::filesystem::path& schema_file,
                      const std::vector<std::filesystem::path>& template_files,
                      const std::filesystem::path& output_dir, const MacroTable& defines = {});

}  // namespace df::schemac
