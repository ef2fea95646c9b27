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

#include "file_util.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <fstream>
#include <sstream>
#include <system_error>

#include "keyauth/bytes.h"

namespace keyauth::internal {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  void close() {
    if (fd_ >= 0 && ::close(fd_) != 0) {
      fd_ = -1;
      throw_errno("close");
    }
    fd_ = -1;
  }

 private:
  int fd_;
};

fs::path temp_sibling(const fs::path& path) {
  std::array<std::uint8_t, 8> tag{};
  fill_random(tag);
  return path.parent_path() /
         ("." + path.filename().string() + ".tmp-" + base64url_encode(ByteView(tag)));
}

void sync_directory(const fs::path& dir) {
  Fd fd(::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (fd.get() >= 0) ::fsync(fd.get());
}

fs::path write_temp(const fs::path& path, std::string_view content, unsigned mode) {
  const fs::path tmp = temp_sibling(path);
  Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC,
               static_cast<mode_t>(mode)));
  if (fd.get() < 0) throw_errno("open " + tmp.string());
  try {
    // The umask may have masked bits off; set the exact mode.
    if (::fchmod(fd.get(), static_cast<mode_t>(mode)) != 0) throw_errno("fchmod");
    const char* p = content.data();
    std::size_t left = content.size();
    while (left > 0) {
      const ssize_t n = ::write(fd.get(), p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw_errno("write " + tmp.string());
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd.get()) != 0) throw_errno("fsync " + tmp.string());
    fd.close();
  } catch (...) {
    ::unlink(tmp.c_str());
    throw;
  }
  return tmp;
}

}  // namespace

void atomic_write_file(const fs::path& path, std::string_view content,
                       unsigned mode) {
  const fs::path tmp = write_temp(path, content, mode);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    const int saved = errno;
    ::unlink(tmp.c_str());
    errno = saved;
    throw_errno("rename to " + path.string());
  }
  sync_directory(path.parent_path());
}

void atomic_create_file(const fs::path& path, std::string_view content,
                        unsigned mode) {
  const fs::path tmp = write_temp(path, content, mode);
  const int rc = ::link(tmp.c_str(), path.c_str());
  const int saved = errno;
  ::unlink(tmp.c_str());
  if (rc != 0) {
    errno = saved;
    throw_errno("create " + path.string());
  }
  sync_directory(path.parent_path());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                            "open " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void ensure_private_directory(const fs::path& dir) {
  std::error_code ec;
  if (dir.empty() || fs::is_directory(dir, ec)) return;
  fs::create_directories(dir, ec);
  if (ec) throw std::system_error(ec, "create " + dir.string());
  fs::permissions(dir, fs::perms::owner_all, fs::perm_options::replace, ec);
  if (ec) throw std::system_error(ec, "chmod " + dir.string());
}

}  // namespace keyauth::internal
