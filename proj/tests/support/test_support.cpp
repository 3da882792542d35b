#include "test_support.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aitest {

TempDir::TempDir(const std::string& prefix) {
  std::string pattern = (fs::temp_directory_path() / (prefix + "-XXXXXX")).string();
  std::vector<char> buf(pattern.begin(), pattern.end());
  buf.push_back('\0');
  if (!::mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
  path_ = buf.data();
}

TempDir::~TempDir() {
  std::error_code ec;
  // Undo permission changes some tests make before removing.
  for (auto it = fs::recursive_directory_iterator(path_, fs::directory_options::skip_permission_denied, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    fs::permissions(it->path(), fs::perms::owner_all, fs::perm_options::add, ec);
  }
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fixture_root() { return AIREADY_FIXTURE_DIR; }
fs::path dataset_fixture(const std::string& name) { return fixture_root() / "datasets" / name; }
fs::path kb_fixture() { return fixture_root() / "kb"; }

const std::vector<std::string>& domain_fixtures() {
  static const std::vector<std::string> names = {"astronomy_survey",   "chemistry_reactions", "climate_stations",
                                                 "ecology_survey",     "genomics_expression", "materials_bandgap"};
  return names;
}

aiready::Table make_table(std::string file, std::vector<std::string> columns, std::vector<aiready::ColumnKind> kinds,
                          std::vector<aiready::Record> rows) {
  aiready::Table t;
  t.file = std::move(file);
  t.columns = std::move(columns);
  t.kinds = std::move(kinds);
  t.rows = std::move(rows);
  return t;
}

aiready::Evidence evidence_of(std::vector<aiready::Table> tables, std::shared_ptr<const aiready::DataProfile> profile) {
  aiready::Evidence ev;
  ev.tables = std::move(tables);
  for (const auto& t : ev.tables) ev.rows_loaded += t.rows.size();
  ev.profile = profile ? std::move(profile) : std::make_shared<aiready::DataProfile>();
  return ev;
}

CommandResult run_command(const std::string& command) {
  CommandResult r;
  std::string full = command + " 2>&1";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

namespace oracle {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return s.substr(b, e - b);
}

bool is_missing(const std::string& cell) {
  std::string t = trim(cell);
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return t.empty() || t == "na" || t == "n/a" || t == "null" || t == "nan";
}

namespace {

// Counts by linear search over a list of distinct values.
template <typename T>
std::vector<std::pair<T, std::size_t>> tally(const std::vector<T>& xs) {
  std::vector<std::pair<T, std::size_t>> out;
  for (const auto& x : xs) {
    bool found = false;
    for (auto& [v, c] : out) {
      if (v == x) {
        ++c;
        found = true;
        break;
      }
    }
    if (!found) out.emplace_back(x, 1);
  }
  return out;
}

template <typename T>
double entropy_nats(const std::vector<T>& xs) {
  double n = static_cast<double>(xs.size());
  double h = 0.0;
  for (const auto& [v, c] : tally(xs)) {
    double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double balance(const std::vector<std::string>& labels) {
  std::vector<std::string> kept;
  for (const auto& l : labels) {
    if (!is_missing(l)) kept.push_back(trim(l));
  }
  auto counts = tally(kept);
  if (counts.size() <= 1) return 0.0;
  return entropy_nats(kept) / std::log(static_cast<double>(counts.size()));
}

double nmi(const std::vector<std::string>& x, const std::vector<std::string>& y) {
  std::vector<std::pair<std::string, std::string>> joint;
  for (std::size_t i = 0; i < x.size(); ++i) joint.emplace_back(x[i], y[i]);
  double hx = entropy_nats(x), hy = entropy_nats(y), hxy = entropy_nats(joint);
  double m = std::min(hx, hy);
  if (m <= 1e-15) return 0.0;
  return (hx + hy - hxy) / m;
}

double duplicate_rate(const std::vector<aiready::Record>& rows) {
  if (rows.empty()) return 0.0;
  std::size_t dup = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[i].size() != rows[j].size()) continue;
      bool same = true;
      for (std::size_t c = 0; c < rows[i].size() && same; ++c) same = trim(rows[i][c]) == trim(rows[j][c]);
      if (same) {
        ++dup;
        break;
      }
    }
  }
  return static_cast<double>(dup) / static_cast<double>(rows.size());
}

double occupancy(const std::vector<std::int64_t>& values, std::int64_t lo, std::int64_t hi, int bins) {
  if (values.empty()) return 0.0;
  if (hi <= lo) {
    for (auto v : values) {
      if (v == lo) return 1.0 / bins;
    }
    return 0.0;
  }
  std::set<std::int64_t> hit;
  for (auto v : values) {
    if (v < lo || v > hi) continue;
    std::int64_t b = (v - lo) * bins / (hi - lo);
    hit.insert(std::min<std::int64_t>(b, bins - 1));
  }
  return static_cast<double>(hit.size()) / bins;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::vector<std::string> inter, uni;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(inter));
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(uni));
  if (uni.empty()) return 1.0;
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

double near_duplicate_fraction(const std::vector<std::vector<std::string>>& token_sets, double threshold) {
  if (token_sets.empty()) return 0.0;
  std::size_t flagged = 0;
  for (std::size_t i = 1; i < token_sets.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (jaccard(token_sets[i], token_sets[j]) >= threshold) {
        ++flagged;
        break;
      }
    }
  }
  return static_cast<double>(flagged) / static_cast<double>(token_sets.size());
}

std::vector<std::string> row_tokens(const std::vector<std::string>& columns, const aiready::Record& row) {
  std::set<std::string> out;
  for (std::size_t c = 0; c < row.size() && c < columns.size(); ++c) {
    if (is_missing(row[c])) continue;
    std::string word;
    for (char ch : row[c] + " ") {
      if (std::isalnum(static_cast<unsigned char>(ch))) {
        word += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      } else if (!word.empty()) {
        out.insert(columns[c] + ":" + word);
        word.clear();
      }
    }
  }
  return {out.begin(), out.end()};
}

namespace {

struct Node {
  double weight = 0.0;
  std::optional<double> leaf;
  std::vector<Node> children;
};

std::optional<double> eval(const Node& n) {
  if (n.children.empty()) return n.leaf;
  double num = 0.0, den = 0.0, plain = 0.0;
  int count = 0;
  for (const auto& c : n.children) {
    auto s = eval(c);
    if (!s) continue;
    num += c.weight * *s;
    den += c.weight;
    plain += *s;
    ++count;
  }
  if (count == 0) return std::nullopt;
  if (den == 0.0) return plain / count;
  return num / den;
}

}  // namespace

Aggregates aggregate(const aiready::Registry& registry, const std::map<std::string, std::optional<double>>& scores) {
  auto element_node = [&](const aiready::AtomicElement& e) {
    Node n;
    n.weight = e.weight;
    auto it = scores.find(e.id);
    if (it != scores.end()) n.leaf = it->second;
    return n;
  };
  auto sub_node = [&](const aiready::SubDimension& s) {
    Node n;
    n.weight = s.weight;
    for (const auto& e : registry.elements) {
      if (e.sub_dimension == s.id) n.children.push_back(element_node(e));
    }
    return n;
  };
  auto dim_node = [&](const aiready::Dimension& d) {
    Node n;
    n.weight = d.weight;
    for (const auto& s : registry.sub_dimensions) {
      if (s.dimension == d.id) n.children.push_back(sub_node(s));
    }
    return n;
  };
  Aggregates out;
  Node root;
  for (const auto& d : registry.dimensions) {
    root.children.push_back(dim_node(d));
    out.dimensions[d.id] = eval(root.children.back());
  }
  for (const auto& s : registry.sub_dimensions) out.sub_dimensions[s.id] = eval(sub_node(s));
  out.total = eval(root);
  return out;
}

}  // namespace oracle

aiready::Registry random_registry(std::mt19937_64& rng) {
  auto weights = [&](std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(n);
    for (auto& x : w) x = u(rng);
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= s;
    return w;
  };
  std::uniform_int_distribution<int> n_sub(1, 5), n_el(1, 6);
  aiready::Registry r;
  r.version = "random";
  const std::vector<std::string> dims = {"T", "Q", "AC", "AS"};
  auto dw = weights(dims.size());
  for (std::size_t d = 0; d < dims.size(); ++d) {
    r.dimensions.push_back({dims[d], dims[d], dw[d]});
    int subs = n_sub(rng);
    auto sw = weights(static_cast<std::size_t>(subs));
    for (int s = 0; s < subs; ++s) {
      std::string sid = dims[d] + std::to_string(s + 1);
      r.sub_dimensions.push_back({sid, dims[d], sid, sw[static_cast<std::size_t>(s)]});
      int els = n_el(rng);
      auto ew = weights(static_cast<std::size_t>(els));
      for (int e = 0; e < els; ++e) {
        aiready::AtomicElement el;
        el.id = sid + "_e" + std::to_string(e);
        el.sub_dimension = sid;
        el.name = el.id;
        el.weight = ew[static_cast<std::size_t>(e)];
        el.evaluator_hint = "external";
        r.elements.push_back(el);
      }
    }
  }
  return r;
}

}  // namespace aitest
