#include "wazobia/ocr.h"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wazobia/error.h"

extern char** environ;

namespace wazobia {
namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

struct ProcessResult {
  int exit_status = 0;
  std::string out;
  std::string err;
};

class Pipe {
 public:
  Pipe() {
    if (::pipe(fds_) != 0) throw Error(ErrorCode::kIo, "pipe failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() {
    if (fds_[0] >= 0) ::close(fds_[0]);
    fds_[0] = -1;
  }
  void close_write() {
    if (fds_[1] >= 0) ::close(fds_[1]);
    fds_[1] = -1;
  }

 private:
  int fds_[2] = {-1, -1};
};

ProcessResult run_process(const std::vector<std::string>& argv) {
  Pipe out, err;
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, out.write_end(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.write_end(), STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, out.read_end());
  posix_spawn_file_actions_addclose(&actions, err.read_end());

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::kOcrUnavailable,
                "cannot run '" + argv[0] + "': " + std::strerror(rc));
  }
  out.close_write();
  err.close_write();

  ProcessResult result;
  std::array<pollfd, 2> fds{{{out.read_end(), POLLIN, 0}, {err.read_end(), POLLIN, 0}}};
  std::array<std::string*, 2> sinks{&result.out, &result.err};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    if (::poll(fds.data(), fds.size(), -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].fd < 0 || fds[i].revents == 0) continue;
      const ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

std::string rstrip(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

}  // namespace

std::string_view ocr_language_code(Language language) {
  switch (language) {
    case Language::kHausa: return "hau";
    case Language::kIgbo: return "ibo";
    case Language::kYoruba: return "yor";
    case Language::kUnknown: return "eng";
  }
  return "eng";
}

bool OcrAdapter::configured() const {
  return template_.find_first_not_of(" \t\r\n") != std::string::npos;
}

std::vector<std::string> OcrAdapter::command_for(const std::filesystem::path& image,
                                                 Language language) const {
  std::vector<std::string> argv;
  std::istringstream words(template_);
  for (std::string word; words >> word;) {
    replace_all(word, "{input}", image.string());
    replace_all(word, "{lang}", ocr_language_code(language));
    argv.push_back(std::move(word));
  }
  return argv;
}

std::string OcrAdapter::extract(const std::filesystem::path& image, Language language) const {
  if (!configured()) throw Error(ErrorCode::kOcrUnavailable, "no OCR command configured");
  if (!std::filesystem::is_regular_file(image)) {
    throw Error(ErrorCode::kFileNotFound, "image not found: " + image.string());
  }
  const ProcessResult r = run_process(command_for(image, language));
  if (r.exit_status != 0) {
    throw Error(ErrorCode::kOcrFailed, "OCR exited with status " +
                                           std::to_string(r.exit_status) + ": " +
                                           rstrip(r.err));
  }
  return rstrip(r.out);
}

std::string read_ocr_command(const std::filesystem::path& data_dir) {
  const auto path = data_dir / "config.json";
  std::ifstream in(path);
  if (!in) return {};
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.contains("ocr_command")) return doc.at("ocr_command").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": " + e.what());
  }
  return {};
}

}  // namespace wazobia
