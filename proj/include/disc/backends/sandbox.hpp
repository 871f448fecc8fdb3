// Copyright 2026 The DISC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "disc/core.hpp"

namespace disc {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;  // stdout
};

// Runs `command` with /bin/sh -c inside `workdir` in its own process group.
// The environment holds only PATH, HOME, TMPDIR and LANG. On timeout the
// whole group is killed.
CommandResult run_sandboxed(const std::string& command, const std::filesystem::path& workdir,
                            const std::optional<std::filesystem::path>& stdin_file,
                            Duration timeout);

}  // namespace disc
