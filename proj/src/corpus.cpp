#include "pbo/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pbo {

namespace fs = std::filesystem;

namespace {
std::string trim(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
  return s;
}
}  // namespace

CorpusEntry load_entry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  CorpusEntry e;
  e.path = path;
  e.name = fs::path(path).stem().string();
  e.source = ss.str();
  std::istringstream lines(e.source);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("--!", 0) != 0) continue;
    std::string kv = line.substr(3);
    auto colon = kv.find(':');
    if (colon == std::string::npos) throw std::runtime_error(path + ": malformed header: " + line);
    std::string k = trim(kv.substr(0, colon)), v = trim(kv.substr(colon + 1));
    if (k == "suite") e.suite = v;
    else if (k == "check") e.check = v;
    else if (k == "returns") e.returns = std::stoll(v);
    else if (k == "leak") e.leak = v == "none" ? 0 : std::stoul(v);
    else if (k == "diverges") e.diverges = v == "true";
    else throw std::runtime_error(path + ": unknown header key " + k);
  }
  if (e.suite.empty()) e.suite = e.check == "ok" ? "positive" : "negative";
  return e;
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<std::string> files;
  for (auto& f : fs::directory_iterator(dir))
    if (f.is_regular_file() && f.path().extension() == ".pbo") files.push_back(f.path().string());
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> out;
  for (auto& f : files) out.push_back(load_entry(f));
  return out;
}

std::string default_corpus_dir() {
  if (const char* e = std::getenv("PBO_CORPUS"); e && *e) return e;
#ifdef PBO_CORPUS_DIR
  return PBO_CORPUS_DIR;
#else
  return "corpus";
#endif
}

}  // namespace pbo
