#include "sess2gts/parse.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace sess2gts {

namespace {

enum class Tok {
  Ident, Int,
  KwNew, KwTrue, KwFalse, KwEnd, KwInt, KwBool, KwTau,
  Pipe, Bang, Query, LAngle, RAngle, LParen, RParen, LBrace, RBrace,
  Colon, Comma, Dot, Plus, Minus, Amp, Star, EqEq, Branch, Select, OPlus,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  int line = 1, col = 1;
  bool adj = false; // no whitespace between this token and the previous one
};

const std::map<std::string, Tok> kKeywords = {
    {"new", Tok::KwNew},   {"true", Tok::KwTrue}, {"false", Tok::KwFalse},
    {"end", Tok::KwEnd},   {"int", Tok::KwInt},   {"bool", Tok::KwBool},
    {"tau", Tok::KwTau},
};

std::string tok_desc(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Int: return "integer " + std::to_string(t.value);
    case Tok::Eof: return "end of input";
    default: return "'" + t.text + "'";
  }
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  bool gap = true;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      gap = true;
      advance(1);
      continue;
    }
    if (c == '#') { // line comment
      while (i < src.size() && src[i] != '\n') advance(1);
      gap = true;
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    t.adj = !gap && !out.empty();
    gap = false;
    auto rest = [&](std::size_t k) { return i + k < src.size() ? src[i + k] : '\0'; };
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      t.value = std::stoll(t.text);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '%') {
      std::size_t j = i + (c == '%' ? 1 : 0);
      if (c == '%' && !(std::isalnum(static_cast<unsigned char>(rest(1))) || rest(1) == '_'))
        throw ParseError(line, col, "'%' must begin a machine-generated name");
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
              src[j] == '\''))
        ++j;
      t.text = src.substr(i, j - i);
      auto kw = kKeywords.find(t.text);
      t.kind = kw == kKeywords.end() ? Tok::Ident : kw->second;
      advance(j - i);
      out.push_back(t);
      continue;
    }
    auto two = [&](Tok k, const char* s) {
      t.kind = k;
      t.text = s;
      advance(2);
      out.push_back(t);
    };
    auto one = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(t);
    };
    switch (c) {
      case '|': one(Tok::Pipe); break;
      case '!': one(Tok::Bang); break;
      case '?': one(Tok::Query); break;
      case '<':
        if (rest(1) == '<') two(Tok::Select, "<<"); else one(Tok::LAngle);
        break;
      case '>':
        if (rest(1) == '>') two(Tok::Branch, ">>"); else one(Tok::RAngle);
        break;
      case '(':
        if (rest(1) == '+' && rest(2) == ')') {
          t.kind = Tok::OPlus;
          t.text = "(+)";
          advance(3);
          out.push_back(t);
        } else {
          one(Tok::LParen);
        }
        break;
      case ')': one(Tok::RParen); break;
      case '{': one(Tok::LBrace); break;
      case '}': one(Tok::RBrace); break;
      case ':': one(Tok::Colon); break;
      case ',': one(Tok::Comma); break;
      case '.': one(Tok::Dot); break;
      case '+': one(Tok::Plus); break;
      case '-': one(Tok::Minus); break;
      case '&': one(Tok::Amp); break;
      case '*': one(Tok::Star); break;
      case '=':
        if (rest(1) == '=') two(Tok::EqEq, "==");
        else throw ParseError(line, col, "expected '==' ('=' alone is not an operator)");
        break;
      default:
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }
  Token eof;
  eof.kind = Tok::Eof;
  eof.text = "<eof>";
  eof.line = line;
  eof.col = col;
  out.push_back(eof);
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  const Token& peek(std::size_t k = 0) const {
    std::size_t j = pos_ + k;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::Eof) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what + ", found " + tok_desc(peek()));
    return next();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    fail_at(peek(), msg);
  }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg);
  }
  void expect_eof() {
    if (!at(Tok::Eof)) fail("trailing input: " + tok_desc(peek()));
  }

  // ---- shared pieces -------------------------------------------------

  std::string ident(const std::string& what) {
    if (!at(Tok::Ident)) fail("expected " + what + ", found " + tok_desc(peek()));
    return next().text;
  }

  // Identifier with an optional, directly attached polarity sign.
  Chan chan() {
    const Token& name = expect(Tok::Ident, "channel name");
    Polarity pol = Polarity::None;
    if (at(Tok::Plus) && peek().adj) {
      next();
      pol = Polarity::Plus;
    } else if (at(Tok::Minus) && peek().adj) {
      next();
      pol = Polarity::Minus;
    }
    return Chan{name.text, pol};
  }

  std::string binder(const std::string& what) {
    const Token& name = expect(Tok::Ident, what);
    if ((at(Tok::Plus) || at(Tok::Minus)) && peek().adj)
      fail(what + " '" + name.text + "' must not carry a polarity");
    return name.text;
  }

  // ---- session types -------------------------------------------------

  SessionTypePtr stype() {
    if (accept(Tok::KwEnd)) return st_end();
    if (accept(Tok::KwInt)) return st_base(BaseType::Int);
    if (accept(Tok::KwBool)) return st_base(BaseType::Bool);
    if (accept(Tok::Query)) {
      expect(Tok::LAngle, "'<'");
      auto payload = stype();
      expect(Tok::RAngle, "'>'");
      expect(Tok::Dot, "'.'");
      return st_in(payload, stype());
    }
    if (accept(Tok::Bang)) {
      expect(Tok::LAngle, "'<'");
      auto payload = stype();
      expect(Tok::RAngle, "'>'");
      expect(Tok::Dot, "'.'");
      return st_out(payload, stype());
    }
    if (accept(Tok::Amp)) return st_branch(label_arms());
    if (accept(Tok::OPlus)) return st_choice(label_arms());
    fail("expected session type, found " + tok_desc(peek()));
  }

  std::vector<LabelArm> label_arms() {
    expect(Tok::LBrace, "'{'");
    std::vector<LabelArm> arms;
    std::set<std::string> seen;
    do {
      const Token& l = expect(Tok::Ident, "label");
      if (!seen.insert(l.text).second)
        fail_at(l, "duplicate label '" + l.text + "'");
      expect(Tok::Colon, "':'");
      arms.push_back({l.text, stype()});
    } while (accept(Tok::Comma));
    expect(Tok::RBrace, "'}'");
    return arms;
  }

  // ---- session processes ----------------------------------------------

  SessionProcPtr sproc() {
    auto p = sterm();
    while (accept(Tok::Pipe)) p = sp_par(p, sterm());
    return p;
  }

  SessionProcPtr sterm() {
    if (at(Tok::Int)) {
      const Token& t = next();
      if (t.value != 0) fail_at(t, "only '0' denotes the inert process");
      return sp_nil();
    }
    if (accept(Tok::Bang)) return sp_repl(sterm());
    if (at(Tok::LParen)) {
      next();
      if (accept(Tok::KwNew)) {
        std::string name = binder("restricted name");
        std::optional<SessionTypePtr> ann;
        if (accept(Tok::Colon)) ann = stype();
        expect(Tok::RParen, "')'");
        return sp_res(name, ann, sterm());
      }
      auto p = sproc();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (at(Tok::Ident)) {
      Chan subj = chan();
      if (accept(Tok::Bang)) {
        expect(Tok::LAngle, "'<'");
        Payload pay = payload();
        expect(Tok::RAngle, "'>'");
        expect(Tok::Dot, "'.'");
        return sp_out(subj, pay, sterm());
      }
      if (accept(Tok::Query)) {
        expect(Tok::LParen, "'('");
        std::string bound = binder("input binder");
        expect(Tok::RParen, "')'");
        expect(Tok::Dot, "'.'");
        return sp_in(subj, bound, sterm());
      }
      if (accept(Tok::Branch)) {
        expect(Tok::LBrace, "'{'");
        std::vector<std::pair<std::string, SessionProcPtr>> arms;
        std::set<std::string> seen;
        do {
          const Token& l = expect(Tok::Ident, "label");
          if (!seen.insert(l.text).second)
            fail_at(l, "duplicate label '" + l.text + "'");
          expect(Tok::Colon, "':'");
          arms.emplace_back(l.text, sproc());
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "'}'");
        return sp_branch(subj, std::move(arms));
      }
      if (accept(Tok::Select)) {
        std::string label = ident("label");
        expect(Tok::Dot, "'.'");
        return sp_select(subj, label, sterm());
      }
      fail("expected '!', '?', '>>' or '<<' after channel, found " + tok_desc(peek()));
    }
    fail("expected process, found " + tok_desc(peek()));
  }

  Payload payload() {
    if (at(Tok::Int)) return Payload{mk_int(next().value)};
    if (accept(Tok::KwTrue)) return Payload{mk_bool(true)};
    if (accept(Tok::KwFalse)) return Payload{mk_bool(false)};
    if (at(Tok::Ident)) {
      if (peek(1).kind == Tok::EqEq) {
        std::string name = next().text;
        next(); // ==
        const Token& n = expect(Tok::Int, "integer literal");
        return Payload{mk_eq(mk_var(name), n.value)};
      }
      return Payload{chan()};
    }
    fail("expected payload, found " + tok_desc(peek()));
  }

  // ---- generic processes ----------------------------------------------

  GenericProcPtr gproc() {
    auto p = gsum();
    while (accept(Tok::Pipe)) p = gp_par(p, gsum());
    return p;
  }

  GenericProcPtr gsum() {
    const Token& first = peek();
    auto p = gterm();
    if (!at(Tok::Plus)) return p;
    std::vector<GuardedArm> arms;
    auto take = [&](GenericProcPtr q, const Token& where) {
      auto* s = std::get_if<GenericProc::Sum>(&q->node);
      if (!s || s->arms.size() != 1)
        fail_at(where, "'+' arms must be input or output prefixes");
      arms.push_back(std::move(s->arms[0]));
    };
    take(std::move(p), first);
    while (accept(Tok::Plus)) {
      const Token& here = peek();
      take(gterm(), here);
    }
    return gp_sum(std::move(arms));
  }

  GenericProcPtr gterm() {
    if (at(Tok::Int)) {
      const Token& t = next();
      if (t.value != 0) fail_at(t, "only '0' denotes the inert process");
      return gp_nil();
    }
    if (accept(Tok::Bang)) return gp_repl(gterm());
    if (at(Tok::LParen)) {
      next();
      if (accept(Tok::KwNew)) {
        std::vector<std::string> names;
        do names.push_back(binder("restricted name"));
        while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
        return gp_res(std::move(names), gterm());
      }
      auto p = gproc();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (at(Tok::Ident)) {
      std::string subj = next().text;
      if (accept(Tok::Bang)) {
        expect(Tok::LAngle, "'<'");
        std::vector<GArg> args;
        if (!at(Tok::RAngle)) {
          do args.push_back(garg());
          while (accept(Tok::Comma));
        }
        expect(Tok::RAngle, "'>'");
        expect(Tok::Dot, "'.'");
        return gp_out(subj, std::move(args), gterm());
      }
      if (accept(Tok::Query)) {
        expect(Tok::LParen, "'('");
        std::vector<std::string> binders;
        if (!at(Tok::RParen)) {
          do binders.push_back(binder("input binder"));
          while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Dot, "'.'");
        return gp_in(subj, std::move(binders), gterm());
      }
      fail("expected '!' or '?' after channel, found " + tok_desc(peek()));
    }
    fail("expected process, found " + tok_desc(peek()));
  }

  GArg garg() {
    if (at(Tok::Int)) return GArg{mk_int(next().value)};
    if (accept(Tok::KwTrue)) return GArg{mk_bool(true)};
    if (accept(Tok::KwFalse)) return GArg{mk_bool(false)};
    if (at(Tok::Ident)) {
      if (peek(1).kind == Tok::EqEq) {
        std::string name = next().text;
        next(); // ==
        const Token& n = expect(Tok::Int, "integer literal");
        return GArg{mk_eq(mk_var(name), n.value)};
      }
      return GArg{next().text};
    }
    fail("expected argument, found " + tok_desc(peek()));
  }

  // ---- process types ---------------------------------------------------

  ProcessTypePtr ptype() {
    auto t = tand();
    while (accept(Tok::Pipe)) t = pt_par(t, tand());
    return t;
  }

  ProcessTypePtr tand() {
    auto t = tsum();
    while (accept(Tok::Amp)) t = pt_and(t, tsum());
    return t;
  }

  ProcessTypePtr tsum() {
    const Token& first = peek();
    auto t = tterm();
    if (!at(Tok::Plus)) return t;
    std::vector<ProcessTypePtr> arms;
    auto take = [&](ProcessTypePtr u, const Token& where) {
      if (!std::holds_alternative<ProcessType::OutPfx>(u->node) &&
          !std::holds_alternative<ProcessType::InPfx>(u->node) &&
          !std::holds_alternative<ProcessType::TauPfx>(u->node)) {
        auto* e = std::get_if<ProcessType::ExtChoice>(&u->node);
        if (!e || e->arms.size() != 1)
          fail_at(where, "'+' arms must be prefixed types");
        arms.push_back(std::move(e->arms[0]));
        return;
      }
      arms.push_back(std::move(u));
    };
    take(std::move(t), first);
    while (accept(Tok::Plus)) {
      const Token& here = peek();
      take(tterm(), here);
    }
    return pt_ext(std::move(arms));
  }

  ProcessTypePtr tterm() {
    if (at(Tok::Int)) {
      const Token& t = next();
      if (t.value != 0) fail_at(t, "only '0' denotes the inert type");
      return pt_zero();
    }
    if (accept(Tok::Star)) return pt_repl(tterm());
    if (accept(Tok::KwTau)) {
      expect(Tok::Dot, "'.'");
      return pt_tau(tterm());
    }
    if (at(Tok::LParen)) {
      next();
      auto t = ptype();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Ident)) {
      std::string subj = next().text;
      bool input;
      if (accept(Tok::Bang)) input = false;
      else if (accept(Tok::Query)) input = true;
      else fail("expected '!' or '?' after channel, found " + tok_desc(peek()));
      expect(Tok::LAngle, "'<'");
      TypePayload pay = tpayload();
      expect(Tok::RAngle, "'>'");
      expect(Tok::Dot, "'.'");
      auto cont = tterm();
      return input ? pt_in(subj, std::move(pay), cont)
                   : pt_out(subj, std::move(pay), cont);
    }
    fail("expected process type, found " + tok_desc(peek()));
  }

  TypePayload tpayload() {
    if (at(Tok::RAngle)) return empty_payload();
    if (at(Tok::LParen)) {
      next();
      TupleType tup;
      if (!at(Tok::RParen)) {
        do tup.binders.push_back(binder("payload binder"));
        while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "')'");
      tup.body = tterm();
      return TypePayload{std::move(tup)};
    }
    std::vector<BaseType> bases;
    do {
      if (accept(Tok::KwInt)) bases.push_back(BaseType::Int);
      else if (accept(Tok::KwBool)) bases.push_back(BaseType::Bool);
      else fail("expected 'int', 'bool' or a tuple payload, found " + tok_desc(peek()));
    } while (accept(Tok::Comma));
    return TypePayload{std::move(bases)};
  }

  // ---- type environments -------------------------------------------------

  TypeEnv type_env() {
    TypeEnv env;
    if (at(Tok::Eof)) return env;
    do {
      const Token& name = expect(Tok::Ident, "channel name");
      Polarity pol = Polarity::None;
      if (at(Tok::Plus) && peek().adj) { next(); pol = Polarity::Plus; }
      else if (at(Tok::Minus) && peek().adj) { next(); pol = Polarity::Minus; }
      expect(Tok::Colon, "':'");
      auto ty = stype();
      if (env.contains(name.text, pol))
        fail_at(name, "duplicate entry for '" + name.text + polarity_suffix(pol) + "'");
      if (pol == Polarity::None
              ? env.mentions_name(name.text)
              : env.contains(name.text, Polarity::None))
        fail_at(name, "conflicting polarities for '" + name.text + "'");
      env.set(name.text, pol, ty);
    } while (accept(Tok::Comma));
    return env;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace

SessionProcPtr parse_session_proc(const std::string& src) {
  Parser p(src);
  auto r = p.sproc();
  p.expect_eof();
  return r;
}

GenericProcPtr parse_generic_proc(const std::string& src) {
  Parser p(src);
  auto r = p.gproc();
  p.expect_eof();
  return r;
}

SessionTypePtr parse_session_type(const std::string& src) {
  Parser p(src);
  auto r = p.stype();
  p.expect_eof();
  return r;
}

ProcessTypePtr parse_process_type(const std::string& src) {
  Parser p(src);
  auto r = p.ptype();
  p.expect_eof();
  return r;
}

TypeEnv parse_type_env(const std::string& src) {
  Parser p(src);
  auto r = p.type_env();
  p.expect_eof();
  return r;
}

} // namespace sess2gts
