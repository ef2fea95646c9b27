// Copyright 2026 The KeyAuth Authors
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

#include "terminal.h"

#include <fcntl.h>
#include <termios.h>
#include <unistd.h>

#include <cctype>
#include <iostream>

namespace keyauth::tools {
namespace {

class Tty {
 public:
  Tty() : fd_(::open("/dev/tty", O_RDWR | O_CLOEXEC)) {}
  ~Tty() {
    if (fd_ >= 0) ::close(fd_);
  }
  Tty(const Tty&) = delete;
  Tty& operator=(const Tty&) = delete;

  bool ok() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  void write(const std::string& s) const {
    std::size_t off = 0;
    while (off < s.size()) {
      const ssize_t n = ::write(fd_, s.data() + off, s.size() - off);
      if (n <= 0) return;
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<SecretString> read_line() const {
    SecretString line;
    char c = 0;
    for (;;) {
      const ssize_t n = ::read(fd_, &c, 1);
      if (n <= 0) return line.empty() ? std::nullopt : std::optional(line);
      if (c == '\n' || c == '\r') break;
      line.push_back(c);
    }
    secure_zero(&c, 1);
    return line;
  }

 private:
  int fd_;
};

}  // namespace

std::optional<SecretString> read_secret(const std::string& prompt) {
  Tty tty;
  if (!tty.ok()) return std::nullopt;
  termios saved{};
  const bool can_mask = ::tcgetattr(tty.fd(), &saved) == 0;
  if (can_mask) {
    termios quiet = saved;
    quiet.c_lflag &= static_cast<tcflag_t>(~ECHO);
    ::tcsetattr(tty.fd(), TCSAFLUSH, &quiet);
  }
  tty.write(prompt);
  auto line = tty.read_line();
  if (can_mask) ::tcsetattr(tty.fd(), TCSAFLUSH, &saved);
  tty.write("\n");
  return line;
}

bool confirm(const std::string& prompt) {
  std::optional<SecretString> line;
  if (Tty tty; tty.ok() && ::isatty(STDIN_FILENO)) {
    tty.write(prompt + " ");
    line = tty.read_line();
  } else {
    // Redirected stdin carries the answer, so scripts can pipe it in.
    std::cerr << prompt << ' ' << std::flush;
    std::string answer;
    if (std::getline(std::cin, answer)) line = SecretString(answer.begin(), answer.end());
  }
  if (!line) return false;
  SecretString answer;
  for (char c : *line) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      answer.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return answer == "y" || answer == "yes";
}

}  // namespace keyauth::tools
