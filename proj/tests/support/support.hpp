#pragma once

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slam/pipeline.hpp"

extern char** environ;

namespace slam::testing {

inline std::string source_path(const std::string& relative) { return std::string(SLAM_SOURCE_DIR) + "/" + relative; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Spec load_files(const std::vector<std::string>& relative) {
  std::vector<std::string> paths;
  for (const auto& r : relative) paths.push_back(source_path(r));
  return load_spec(paths);
}

inline const std::vector<std::string>& corpus_files() {
  static const std::vector<std::string> files{"specs/point.slam", "specs/segment.slam", "specs/stack.slam",
                                              "specs/tree.slam", "specs/banks.slam"};
  return files;
}

inline bool has_code(const Diagnostics& diags, const std::string& code) {
  return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; });
}

struct ProcessResult {
  int status = -1;
  std::string out;
  std::string err;
};

/// Runs the built `slamc` with the given arguments, capturing both streams.
inline ProcessResult run_slamc(const std::vector<std::string>& args) {
  namespace fs = std::filesystem;
  static int counter = 0;
  fs::path dir = fs::temp_directory_path();
  std::string stem = "slam-test-" + std::to_string(getpid()) + "-" + std::to_string(++counter);
  fs::path out_path = dir / (stem + ".out");
  fs::path err_path = dir / (stem + ".err");
  std::vector<std::string> argv{SLAMC_PATH};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<char*> raw;
  for (auto& a : argv) raw.push_back(a.data());
  raw.push_back(nullptr);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  pid_t pid = 0;
  ProcessResult r;
  if (posix_spawn(&pid, raw[0], &actions, nullptr, raw.data(), environ) == 0) {
    int status = 0;
    waitpid(pid, &status, 0);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  posix_spawn_file_actions_destroy(&actions);
  r.out = read_text(out_path.string());
  r.err = read_text(err_path.string());
  fs::remove(out_path);
  fs::remove(err_path);
  return r;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("slam-test-" + std::to_string(getpid()) + "-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

/// Random values of every kind, nested to `depth`.
class ValueGen {
 public:
  explicit ValueGen(unsigned seed) : rng_(seed) {}

  Value any(int depth) {
    int kinds = depth > 0 ? 7 : 4;
    switch (pick(kinds)) {
      case 0: return Value::integer(integer());
      case 1: return Value::real(real());
      case 2: return Value::boolean(pick(2) == 1);
      case 3: return Value::string(text());
      case 4: {
        ValueList items(pick(depth > 3 ? 4 : 9));
        for (auto& v : items) v = any(depth - 1);
        return Value::seq(std::move(items));
      }
      case 5: {
        FieldList fields;
        std::size_t n = pick(4);
        for (std::size_t i = 0; i < n; ++i) fields.emplace_back("f" + std::to_string(i) + label(), any(depth - 1));
        return Value::record(std::move(fields));
      }
      default: {
        ValueList args(pick(4));
        for (auto& v : args) v = any(depth - 1);
        return Value::con("Tag" + label(), std::move(args));
      }
    }
  }

  std::int64_t integer() {
    switch (pick(4)) {
      case 0: return static_cast<std::int64_t>(pick(10));
      case 1: return -static_cast<std::int64_t>(pick(1000));
      case 2: return std::uniform_int_distribution<std::int64_t>(INT64_MIN, INT64_MAX)(rng_);
      default: return std::uniform_int_distribution<std::int64_t>(-1000000, 1000000)(rng_);
    }
  }

  double real() {
    switch (pick(5)) {
      case 0: return static_cast<double>(pick(100)) / 4.0;
      case 1: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng_);
      case 2: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1.0)(rng_), static_cast<int>(pick(600)) - 300);
      case 3: return -0.0 + 0.1 * static_cast<double>(pick(30));
      default: return 1.0 / 3.0 * static_cast<double>(pick(50) + 1);
    }
  }

  std::string text() {
    static const std::string alphabet = "ab Z09<>&\"'\t\n\xc3\xa9";
    std::string s;
    std::size_t n = pick(8);
    for (std::size_t i = 0; i < n; ++i) {
      char c = alphabet[pick(alphabet.size() - 1)];
      if (c == '\xc3') s += "\xc3\xa9";
      else s += c;
    }
    return s;
  }

  std::string label() {
    static const std::string letters = "abcxyz";
    std::string s;
    for (std::size_t i = 0, n = pick(3); i < n; ++i) s += letters[pick(letters.size())];
    return s;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::mt19937& rng() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace slam::testing

namespace slam::testing {

/// Structural damage to a serialized document: truncation, a deleted markup
/// byte, a stray `<`, trailing bytes, or a broken header.
inline std::string corrupt_document(const std::string& doc, std::mt19937& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  switch (pick(5)) {
    case 0:
      return doc.substr(0, pick(doc.size()));
    case 1: {
      std::vector<std::size_t> markup;
      for (std::size_t i = 0; i < doc.size(); ++i) {
        if (std::string_view("<>/=\"").find(doc[i]) != std::string_view::npos) markup.push_back(i);
      }
      std::string out = doc;
      out.erase(markup[pick(markup.size())], 1);
      return out;
    }
    case 2: {
      std::string out = doc;
      out.insert(pick(doc.size() + 1), "<");
      return out;
    }
    case 3: {
      static const std::vector<std::string> tails{"x", "<v k=\"int\">1</v>", " ", "\n", "</slamx>"};
      return doc + tails[pick(tails.size())];
    }
    default: {
      std::string out = doc;
      static const std::vector<std::pair<std::string, std::string>> damage{
          {"<slamx ", "<slamy "}, {"version=", "versoin="}, {" spec=\"", " spec=\"g"}, {"\">", "\" >"}};
      const auto& [from, to] = damage[pick(damage.size())];
      out.replace(out.find(from), from.size(), to);
      return out;
    }
  }
}

}  // namespace slam::testing
