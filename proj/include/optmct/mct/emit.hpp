// Copyright 2026 optmct Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "optmct/mct/canonical.hpp"

namespace optmct {

/// A canonical form rendered as parseable circuit text. Outcome names are
/// renumbered (x<p> for preparations, w<o> for observations) because outcome
/// words of composed forms contain '.', which the surface syntax cannot
/// spell; `labels` gives the evaluator outcome word of the emitted circuit
/// for each original (prep outcome, obs outcome) pair.
struct EmittedOpt {
  std::string text;
  std::vector<std::vector<std::string>> labels;
};

namespace detail {

// Adjacent-transposition word realizing sigma: applying the swaps in order
// to the running arrangement is exactly perm_from_generators.
inline std::vector<std::size_t> adjacent_word(const PermutationSpec &sigma) {
  const std::size_t n = sigma.factor_count();
  std::vector<std::size_t> arr(n), inv = sigma.inverse().mapping();
  for (std::size_t i = 0; i < n; ++i) arr[i] = i;
  std::vector<std::size_t> word;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t pos = j;
    while (arr[pos] != inv[j]) ++pos;
    for (std::size_t k = pos; k > j; --k) {
      word.push_back(k - 1);
      std::swap(arr[k - 1], arr[k]);
    }
  }
  return word;
}

class OptEmitter {
 public:
  explicit OptEmitter(const CanonicalForm &cf) : cf_(cf) {}

  EmittedOpt run() {
    check_canonical(cf_);
    // the pad keeps both registers declarable even when C (and A' or B')
    // is trivial; a dim-1 wire threads from the preparation to the
    // observation and changes nothing
    const std::vector<std::size_t> pad{1};
    SystemType prep_reg(concat(pad, concat(cf_.C.factors(), cf_.Bp.factors())));
    SystemType obs_reg(concat(pad, concat(cf_.C.factors(), cf_.Ap.factors())));

    // input sorting word on A
    emit_word(cf_.S1, cf_.A.factors());

    // preparation beside the untouched [A' ++ E]
    std::vector<std::size_t> ape = concat(cf_.Ap.factors(), cf_.E.factors());
    {
      std::vector<std::string> parts{"prep(rho)"};
      tokens_.push_back(Token::Prep);
      append_id_leaves(ape, parts);
      stages_.push_back(join_par(parts));
    }

    // central block swap when both sides are present
    if (cf_.Bp.factor_count() > 0 && cf_.Ap.factor_count() > 0) {
      std::vector<std::string> parts;
      std::vector<std::size_t> head = concat(pad, cf_.C.factors());
      append_id_leaves(head, parts);
      parts.push_back("swap(" + name_of(cf_.Bp.factors()) + ", " +
                      name_of(cf_.Ap.factors()) + ")");
      tokens_.push_back(Token::Star);
      append_id_leaves(cf_.E.factors(), parts);
      stages_.push_back(join_par(parts));
    }

    // observation beside the surviving [B' ++ E]
    std::vector<std::size_t> bpe = concat(cf_.Bp.factors(), cf_.E.factors());
    {
      std::vector<std::string> parts{"obs(meas)"};
      tokens_.push_back(Token::Obs);
      append_id_leaves(bpe, parts);
      stages_.push_back(join_par(parts));
    }

    // output sorting word on [B' ++ E]
    emit_word(cf_.S2, bpe);

    EmittedOpt out;
    out.text = render(prep_reg, obs_reg);
    out.labels = label_grid();
    return out;
  }

 private:
  enum class Token { Star, Prep, Obs };

  static std::vector<std::size_t> concat(const std::vector<std::size_t> &a,
                                         const std::vector<std::size_t> &b) {
    std::vector<std::size_t> r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
  }

  std::string name_of(const std::vector<std::size_t> &dims) {
    auto it = names_.find(dims);
    if (it != names_.end()) return it->second;
    std::string name = dims.size() == 1 ? "F" + std::to_string(dims[0])
                                        : "R" + std::to_string(names_.size());
    names_.emplace(dims, name);
    decl_order_.push_back(dims);
    return name;
  }

  void append_id_leaves(const std::vector<std::size_t> &dims,
                        std::vector<std::string> &parts) {
    for (std::size_t d : dims) {
      parts.push_back("id(" + name_of({d}) + ")");
      tokens_.push_back(Token::Star);
    }
  }

  static std::string join_par(const std::vector<std::string> &parts) {
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += " | " + parts[i];
    return s;
  }

  // one stage per adjacent swap; the arrangement evolves as the word runs
  void emit_word(const PermutationSpec &sigma, std::vector<std::size_t> dims) {
    for (std::size_t k : adjacent_word(sigma)) {
      std::vector<std::string> parts;
      std::vector<std::size_t> head(dims.begin(), dims.begin() + k);
      append_id_leaves(head, parts);
      parts.push_back("swap(" + name_of({dims[k]}) + ", " +
                      name_of({dims[k + 1]}) + ")");
      tokens_.push_back(Token::Star);
      std::vector<std::size_t> tail(dims.begin() + k + 2, dims.end());
      append_id_leaves(tail, parts);
      stages_.push_back(join_par(parts));
      std::swap(dims[k], dims[k + 1]);
    }
  }

  static void append_rat_row(std::string &s, const RatMatrix &m, bool column) {
    s += "[";
    const std::size_t n = column ? m.rows() : m.cols();
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ", ";
      s += (column ? m.at(i, 0) : m.at(0, i)).get_str();
    }
    s += "]";
  }

  std::string render(const SystemType &prep_reg, const SystemType &obs_reg) {
    // force declarations for the register composites
    name_of(prep_reg.factors());
    name_of(obs_reg.factors());
    std::string s;
    for (const auto &dims : decl_order_) {
      s += "system " + names_.at(dims) + " = [";
      for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(dims[i]);
      }
      s += "]\n";
    }
    s += "ptest rho on " + names_.at(prep_reg.factors()) + " {\n";
    for (std::size_t p = 0; p < cf_.prep.outcome_count(); ++p) {
      s += "  x" + std::to_string(p) + ": ";
      append_rat_row(s, cf_.prep.event(p), true);
      s += p + 1 < cf_.prep.outcome_count() ? ",\n" : "\n";
    }
    s += "}\n";
    s += "otest meas on " + names_.at(obs_reg.factors()) + " {\n";
    for (std::size_t o = 0; o < cf_.obs.outcome_count(); ++o) {
      s += "  w" + std::to_string(o) + ": ";
      append_rat_row(s, cf_.obs.event(o), false);
      s += o + 1 < cf_.obs.outcome_count() ? ",\n" : "\n";
    }
    s += "}\n";
    s += "circuit:\n";
    for (std::size_t i = 0; i < stages_.size(); ++i)
      s += "  " + stages_[i] + (i + 1 < stages_.size() ? " ;\n" : "\n");
    return s;
  }

  std::vector<std::vector<std::string>> label_grid() const {
    std::vector<std::vector<std::string>> grid(
        cf_.prep.outcome_count(),
        std::vector<std::string>(cf_.obs.outcome_count()));
    for (std::size_t p = 0; p < cf_.prep.outcome_count(); ++p)
      for (std::size_t o = 0; o < cf_.obs.outcome_count(); ++o) {
        std::string s;
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
          if (i) s += ".";
          switch (tokens_[i]) {
            case Token::Star:
              s += "*";
              break;
            case Token::Prep:
              s += "x" + std::to_string(p);
              break;
            case Token::Obs:
              s += "w" + std::to_string(o);
              break;
          }
        }
        grid[p][o] = s;
      }
    return grid;
  }

  const CanonicalForm &cf_;
  std::map<std::vector<std::size_t>, std::string> names_;
  std::vector<std::vector<std::size_t>> decl_order_;
  std::vector<std::string> stages_;
  std::vector<Token> tokens_;
};

}  // namespace detail

/// Renders the form as a circuit in the template shape; the result parses,
/// typechecks, and evaluates to the same events under the returned labels.
inline EmittedOpt emit_opt(const CanonicalForm &cf) {
  return detail::OptEmitter(cf).run();
}

}  // namespace optmct
