// Copyright 2026 The morphalign Authors
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

// Shared helpers for the test binaries: fixture access, random model
// parameters and brute-force oracles written independently of the library.

#ifndef MORPHALIGN_TESTS_TEST_UTIL_HPP
#define MORPHALIGN_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "morphalign/morphalign.hpp"

namespace morphalign::testing {

inline std::string fixture(const std::string& name) {
  return std::string(MORPHALIGN_FIXTURES) + "/" + name;
}

inline Bitext synth_bitext() {
  return load_bitext(fixture("synth.src"), fixture("synth.tgt"), "synth-forward");
}

inline Bitext bitext_from_lines(const std::vector<std::string>& src,
                                const std::vector<std::string>& tgt,
                                const std::string& label = "test") {
  return build_bitext(tokenize_parallel(src, tgt), label);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("morphalign-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) s += (x = u(rng));
  for (auto& x : v) x /= s;
  return v;
}

/// Random sentence pair over small vocabularies (ids from 1).
struct Instance {
  std::vector<TokenId> e, f;
};

inline Instance random_instance(std::mt19937_64& rng, std::size_t l, std::size_t m,
                                std::size_t src_types, std::size_t tgt_types) {
  std::uniform_int_distribution<TokenId> ds(1, static_cast<TokenId>(src_types));
  std::uniform_int_distribution<TokenId> dt(1, static_cast<TokenId>(tgt_types));
  Instance x;
  for (std::size_t i = 0; i < l; ++i) x.e.push_back(ds(rng));
  for (std::size_t j = 0; j < m; ++j) x.f.push_back(dt(rng));
  return x;
}

/// Dense random Model 1/2 parameters: every t(.|e) row covers all target
/// types; the alignment table covers the (l, m) of `inst`.
inline ModelParams random_lexical_params(std::mt19937_64& rng, std::size_t src_types,
                                         std::size_t tgt_types, const Instance& inst,
                                         bool use_null = true) {
  ModelParams p;
  p.config.use_null = use_null;
  p.src_vocab_size = src_types + 1;
  p.tgt_vocab_size = tgt_types + 1;
  std::vector<std::tuple<TokenId, TokenId, double>> cells;
  for (TokenId e = 0; e <= src_types; ++e) {
    const auto row = random_simplex(rng, tgt_types);
    for (TokenId f = 1; f <= tgt_types; ++f) cells.emplace_back(e, f, row[f - 1]);
  }
  p.ttable[0] = TTable::from_cells(src_types + 1, cells);
  p.ttable[1] = p.ttable[0];
  const std::size_t l = inst.e.size(), m = inst.f.size();
  LengthKeyedTable::KeySet keys{{static_cast<std::uint32_t>(l),
                                 static_cast<std::uint32_t>(m)}};
  p.atable = ATable::uniform(keys, use_null);
  const std::size_t first = use_null ? 0 : 1;
  for (std::size_t j = 1; j <= m; ++j) {
    const auto row = random_simplex(rng, l + 1 - first);
    for (std::size_t i = first; i <= l; ++i)
      p.atable->values()[static_cast<std::size_t>(p.atable->index(i, j, l, m))] =
          row[i - first];
  }
  p.stage = Stage::M2;
  return p;
}

/// Every alignment vector in {first..l}^m, in lexicographic order.
template <class Visit>
void enumerate_alignments(std::size_t l, std::size_t m, bool use_null, Visit&& visit) {
  const Cept first = use_null ? 0 : 1;
  std::vector<Cept> a(m, first);
  for (;;) {
    visit(static_cast<const std::vector<Cept>&>(a));
    std::size_t j = m;
    while (j > 0) {
      --j;
      if (a[j] < l) {
        ++a[j];
        break;
      }
      a[j] = first;
      if (j == 0) return;
    }
    if (m == 0) return;
  }
}

/// P(f, a | e) for Models 1 and 2 written straight from the product form.
inline double oracle_joint_lexical(const ModelParams& p, Stage stage,
                                   const std::vector<TokenId>& e,
                                   const std::vector<TokenId>& f,
                                   const std::vector<Cept>& a) {
  const std::size_t l = e.size(), m = f.size();
  const auto& tt = *p.ttable[static_cast<std::size_t>(index_of(stage))];
  double prod = 1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    const TokenId src = a[j - 1] == 0 ? kNullId : e[a[j - 1] - 1];
    prod *= tt.prob(src, f[j - 1]);
    if (stage == Stage::M1)
      prod /= double(p.config.use_null ? l + 1 : l);
    else
      prod *= p.atable->prob(a[j - 1], j, l, m);
  }
  return prod;
}

}  // namespace morphalign::testing

#endif  // MORPHALIGN_TESTS_TEST_UTIL_HPP
