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

#include <cctype>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "optmct/circuit/ast.hpp"
#include "optmct/rational.hpp"

namespace optmct {

struct ParseError : std::invalid_argument {
  std::size_t line, col;
  ParseError(const std::string &what, std::size_t l, std::size_t c)
      : std::invalid_argument("syntax error at " + std::to_string(l) + ":" +
                              std::to_string(c) + ": " + what),
        line(l),
        col(c) {}
};

namespace detail {

enum class TokKind { Ident, Int, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::size_t line = 1, col = 1;
};

inline std::vector<Token> lex(const std::string &src) {
  std::vector<Token> toks;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(src[i++]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = TokKind::Ident;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                src[i] == '_')) {
        t.text += src[i];
        advance(src[i++]);
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = TokKind::Int;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        t.text += src[i];
        advance(src[i++]);
      }
    } else if (std::string("[]{}(),;|:=/").find(c) != std::string::npos) {
      t.kind = TokKind::Punct;
      t.text = c;
      advance(c);
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    toks.push_back(std::move(t));
  }
  Token end;
  end.kind = TokKind::End;
  end.line = line;
  end.col = col;
  toks.push_back(std::move(end));
  return toks;
}

class Parser {
 public:
  explicit Parser(const std::string &src) : toks_(lex(src)) {}

  CircuitSource parse_source() {
    CircuitSource out;
    while (true) {
      const Token &t = peek();
      if (t.kind == TokKind::Ident && t.text == "system") {
        parse_system_decl(out);
      } else if (t.kind == TokKind::Ident && (t.text == "ptest" || t.text == "otest")) {
        parse_test_decl(out);
      } else if (t.kind == TokKind::Ident && t.text == "circuit") {
        next();
        expect_punct(":");
        out.circuit = parse_expr(out);
        break;
      } else {
        throw ParseError("expected a declaration or 'circuit:'", t.line, t.col);
      }
    }
    const Token &t = peek();
    if (t.kind != TokKind::End)
      throw ParseError("unexpected trailing input '" + t.text + "'", t.line, t.col);
    return out;
  }

 private:
  const Token &peek() const { return toks_[pos_]; }
  const Token &next() { return toks_[pos_++]; }

  const Token &expect_punct(const std::string &p) {
    const Token &t = peek();
    if (t.kind != TokKind::Punct || t.text != p)
      throw ParseError("expected '" + p + "'", t.line, t.col);
    return next();
  }

  std::string expect_ident(const std::string &what) {
    const Token &t = peek();
    if (t.kind != TokKind::Ident)
      throw ParseError("expected " + what, t.line, t.col);
    return next().text;
  }

  std::size_t expect_int() {
    const Token &t = peek();
    if (t.kind != TokKind::Int)
      throw ParseError("expected an integer", t.line, t.col);
    return static_cast<std::size_t>(std::stoull(next().text));
  }

  Rat parse_rational() {
    const Token &t = peek();
    if (t.kind != TokKind::Int)
      throw ParseError("expected a rational literal", t.line, t.col);
    long num = std::stol(next().text);
    if (peek().kind == TokKind::Punct && peek().text == "/") {
      next();
      const Token &d = peek();
      if (d.kind != TokKind::Int)
        throw ParseError("expected a denominator", d.line, d.col);
      long den = std::stol(next().text);
      if (den == 0) throw ParseError("zero denominator", d.line, d.col);
      return make_rat(num, den);
    }
    return make_rat(num);
  }

  void parse_system_decl(CircuitSource &out) {
    next();  // 'system'
    const Token &name_tok = peek();
    std::string name = expect_ident("a system name");
    if (out.find_system(name))
      throw ParseError("system '" + name + "' already declared", name_tok.line,
                       name_tok.col);
    expect_punct("=");
    expect_punct("[");
    std::vector<std::size_t> dims;
    dims.push_back(expect_int());
    while (peek().kind == TokKind::Punct && peek().text == ",") {
      next();
      dims.push_back(expect_int());
    }
    expect_punct("]");
    for (auto d : dims)
      if (d == 0)
        throw ParseError("factor dimension must be positive", name_tok.line,
                         name_tok.col);
    out.systems.emplace_back(std::move(name), SystemType(std::move(dims)));
  }

  void parse_test_decl(CircuitSource &out) {
    bool is_prep = peek().text == "ptest";
    next();
    const Token &name_tok = peek();
    std::string name = expect_ident("a test name");
    if (out.find_test(name))
      throw ParseError("test '" + name + "' already declared", name_tok.line,
                       name_tok.col);
    const Token &on_tok = peek();
    if (on_tok.kind != TokKind::Ident || on_tok.text != "on")
      throw ParseError("expected 'on'", on_tok.line, on_tok.col);
    next();
    const Token &sys_tok = peek();
    std::string sys_name = expect_ident("a system name");
    const SystemType *sys = out.find_system(sys_name);
    if (!sys)
      throw ParseError("unknown system '" + sys_name + "'", sys_tok.line, sys_tok.col);
    expect_punct("{");
    std::vector<std::pair<std::string, std::vector<Rat>>> outcomes;
    while (true) {
      const Token &lbl_tok = peek();
      std::string lbl = expect_ident("an outcome label");
      for (const auto &[l, v] : outcomes)
        if (l == lbl)
          throw ParseError("duplicate outcome label '" + lbl + "'", lbl_tok.line,
                           lbl_tok.col);
      expect_punct(":");
      expect_punct("[");
      std::vector<Rat> vec;
      vec.push_back(parse_rational());
      while (peek().kind == TokKind::Punct && peek().text == ",") {
        next();
        vec.push_back(parse_rational());
      }
      expect_punct("]");
      if (vec.size() != sys->dim())
        throw ParseError("outcome '" + lbl + "' has " + std::to_string(vec.size()) +
                             " entries; system " + sys_name + " has dimension " +
                             std::to_string(sys->dim()),
                         lbl_tok.line, lbl_tok.col);
      outcomes.emplace_back(std::move(lbl), std::move(vec));
      if (peek().kind == TokKind::Punct && peek().text == ",") {
        next();
        continue;
      }
      break;
    }
    expect_punct("}");
    CircuitSource::TestDecl decl;
    decl.is_prep = is_prep;
    decl.name = name;
    decl.sys_name = sys_name;
    try {
      if (is_prep) {
        std::vector<std::pair<std::string, StateVector>> states;
        for (auto &[l, v] : outcomes) states.emplace_back(l, StateVector{*sys, v});
        decl.test = preparation_test(*sys, std::move(states));
      } else {
        std::vector<std::pair<std::string, EffectVector>> effects;
        for (auto &[l, v] : outcomes) effects.emplace_back(l, EffectVector{*sys, v});
        decl.test = observation_test(*sys, std::move(effects));
      }
    } catch (const std::exception &e) {
      throw ParseError("invalid test '" + name + "': " + e.what(), name_tok.line,
                       name_tok.col);
    }
    out.tests.push_back(std::move(decl));
  }

  // expr := par { ';' par }     par := atom { '|' atom }
  NodePtr parse_expr(const CircuitSource &env) {
    NodePtr acc = parse_par(env);
    while (peek().kind == TokKind::Punct && peek().text == ";") {
      const Token &op = next();
      acc = make_seq(acc, parse_par(env), SourcePos{op.line, op.col});
    }
    return acc;
  }

  NodePtr parse_par(const CircuitSource &env) {
    NodePtr acc = parse_atom(env);
    while (peek().kind == TokKind::Punct && peek().text == "|") {
      const Token &op = next();
      acc = make_par(acc, parse_atom(env), SourcePos{op.line, op.col});
    }
    return acc;
  }

  NodePtr parse_atom(const CircuitSource &env) {
    const Token &t = peek();
    if (t.kind == TokKind::Punct && t.text == "(") {
      next();
      NodePtr inner = parse_expr(env);
      expect_punct(")");
      return inner;
    }
    if (t.kind != TokKind::Ident)
      throw ParseError("expected a circuit atom", t.line, t.col);
    SourcePos pos{t.line, t.col};
    std::string head = next().text;
    const Token &paren = peek();
    if (paren.kind != TokKind::Punct || paren.text != "(")
      throw ParseError("expected '(' after '" + head + "'", paren.line, paren.col);
    SourcePos paren_pos{paren.line, paren.col};
    next();
    auto require_arg = [&]() -> std::string {
      const Token &a = peek();
      if (a.kind != TokKind::Ident)
        throw ParseError("unterminated '" + head + "(' call", paren_pos.line,
                         paren_pos.col);
      return next().text;
    };
    if (head == "id") {
      std::string sys_name = require_arg();
      const SystemType *sys = env.find_system(sys_name);
      if (!sys)
        throw ParseError("unknown system '" + sys_name + "'", pos.line, pos.col);
      expect_punct(")");
      return make_identity(*sys, sys_name, pos);
    }
    if (head == "swap") {
      std::string a = require_arg();
      expect_punct(",");
      std::string b = require_arg();
      const SystemType *sa = env.find_system(a);
      const SystemType *sb = env.find_system(b);
      if (!sa) throw ParseError("unknown system '" + a + "'", pos.line, pos.col);
      if (!sb) throw ParseError("unknown system '" + b + "'", pos.line, pos.col);
      expect_punct(")");
      return make_permutation(PermutationSpec::block_swap(*sa, *sb), a, b, pos);
    }
    if (head == "prep" || head == "obs") {
      std::string name = require_arg();
      const CircuitSource::TestDecl *decl = env.find_test(name);
      if (!decl)
        throw ParseError("unknown test '" + name + "'", pos.line, pos.col);
      expect_punct(")");
      if (head == "prep") {
        if (!decl->is_prep)
          throw ParseError("'" + name + "' is an observation test; prep() needs a ptest",
                           pos.line, pos.col);
        return make_prep(decl->test, name, pos);
      }
      if (decl->is_prep)
        throw ParseError("'" + name + "' is a preparation test; obs() needs an otest",
                         pos.line, pos.col);
      return make_obs(decl->test, name, pos);
    }
    throw ParseError("unknown circuit atom '" + head + "'", pos.line, pos.col);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a complete `.opt` source: declarations followed by `circuit: expr`.
inline CircuitSource parse(const std::string &text) {
  return detail::Parser(text).parse_source();
}

}  // namespace optmct
