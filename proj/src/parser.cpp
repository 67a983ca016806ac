#include <algorithm>
#include <set>

#include "crmpst/frontend.hpp"
#include "lexer.hpp"

namespace crmpst {

namespace {

class ParserBase {
 public:
  ParserBase(std::vector<Token> tokens, std::vector<Diagnostic>& diagnostics)
      : tokens_(std::move(tokens)), diagnostics_(diagnostics) {}

 protected:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diagnostics_;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at(Token::Kind kind) const { return peek().kind == kind; }
  bool at_keyword(const std::string& kw) const {
    return peek().kind == Token::Kind::Ident && peek().text == kw;
  }
  bool accept(Token::Kind kind) {
    if (!at(kind)) return false;
    advance();
    return true;
  }
  bool accept_keyword(const std::string& kw) {
    if (!at_keyword(kw)) return false;
    advance();
    return true;
  }

  void error(const std::string& rule, const std::string& message, Span span) {
    diagnostics_.push_back({Diagnostic::Severity::Error, rule, message, span});
  }
  void warning(const std::string& rule, const std::string& message, Span span) {
    diagnostics_.push_back({Diagnostic::Severity::Warning, rule, message, span});
  }

  bool expect(Token::Kind kind, const std::string& what) {
    if (accept(kind)) return true;
    error("SyntaxError", "expected " + what + ", found '" + describe(peek()) + "'", peek().span);
    return false;
  }
  bool expect_keyword(const std::string& kw) {
    if (accept_keyword(kw)) return true;
    error("SyntaxError", "expected '" + kw + "', found '" + describe(peek()) + "'", peek().span);
    return false;
  }
  std::string expect_ident(const std::string& what) {
    if (at(Token::Kind::Ident)) return advance().text;
    error("SyntaxError", "expected " + what + ", found '" + describe(peek()) + "'", peek().span);
    return {};
  }

  static std::string describe(const Token& t) {
    return t.kind == Token::Kind::Eof ? "end of input" : t.text;
  }
};

// ---------------------------------------------------------------------------
// Protocol parser

class ProtocolParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  std::optional<ProtocolDecl> parse() {
    ProtocolDecl decl;
    if (!expect_keyword("global") || !expect_keyword("protocol")) return std::nullopt;
    decl.name = expect_ident("protocol name");
    if (decl.name.empty()) return std::nullopt;
    if (!expect(Token::Kind::LParen, "'('")) return std::nullopt;
    do {
      bool reliable = accept_keyword("reliable");
      if (!expect_keyword("role")) return std::nullopt;
      Span sp = peek().span;
      std::string name = expect_ident("role name");
      if (name.empty()) return std::nullopt;
      for (const auto& [r, rel] : decl.roles)
        if (r.name == name) error("DuplicateRole", "role '" + name + "' declared twice", sp);
      decl.roles.emplace_back(Role{name}, reliable);
      declared_.insert(name);
    } while (accept(Token::Kind::Comma));
    if (!expect(Token::Kind::RParen, "')'")) return std::nullopt;

    decl.body = parse_block();
    if (!decl.body) return std::nullopt;
    if (!at(Token::Kind::Eof))
      error("SyntaxError", "unexpected input after protocol body", peek().span);

    for (const auto& [r, rel] : decl.roles)
      if (!used_.count(r.name))
        warning("UnusedRole", "declared role '" + r.name + "' does not appear in the body",
                Span{});
    return decl;
  }

 private:
  std::set<std::string> declared_;
  std::set<std::string> used_;
  std::set<std::string> binders_;

  Role use_role(const std::string& name, Span span) {
    if (!declared_.count(name))
      error("UndeclaredRole", "role '" + name + "' is not declared", span);
    used_.insert(name);
    return Role{name};
  }

  std::optional<Sort> parse_payload() {
    if (!accept(Token::Kind::LParen)) return Sort::Unit;
    Span sp = peek().span;
    std::string text = expect_ident("payload sort");
    auto sort = sort_from_string(text);
    if (!sort) {
      error("UnknownSort", "unknown payload sort '" + text + "'", sp);
      sort = Sort::Unit;
    }
    expect(Token::Kind::RParen, "')'");
    return sort;
  }

  GlobalPtr parse_block() {
    if (!expect(Token::Kind::LBrace, "'{'")) return nullptr;
    GlobalPtr body = parse_stmts();
    expect(Token::Kind::RBrace, "'}'");
    return body;
  }

  // A statement list folds into one continuation chain; exhaustion is end.
  GlobalPtr parse_stmts() {
    if (at(Token::Kind::RBrace) || at(Token::Kind::Eof)) return g_end();

    Span sp = peek().span;
    if (accept_keyword("end")) {
      expect(Token::Kind::Semi, "';'");
      require_tail("end");
      return g_end();
    }
    if (accept_keyword("continue")) {
      std::string var = expect_ident("recursion variable");
      expect(Token::Kind::Semi, "';'");
      if (!binders_.count(var))
        error("FreeRecVar", "continue references unbound variable '" + var + "'", sp);
      require_tail("continue");
      return g_recvar(var, sp);
    }
    if (accept_keyword("rec")) {
      std::string var = expect_ident("recursion variable");
      if (binders_.count(var)) {
        error("ShadowedBinder", "recursion binder '" + var + "' shadows an enclosing binder", sp);
        return nullptr;
      }
      binders_.insert(var);
      GlobalPtr body = parse_block();
      binders_.erase(var);
      if (!body) return nullptr;
      require_tail("rec");
      return g_rec(var, body, sp);
    }
    if (accept_keyword("choice")) {
      expect_keyword("at");
      Span rsp = peek().span;
      Role chooser = use_role(expect_ident("role name"), rsp);
      std::vector<GlobalBranch> branches;
      std::optional<Role> receiver;
      bool first = true;
      while (first || at_keyword("or")) {
        if (!first) advance();  // 'or'
        first = false;
        auto arm = parse_choice_arm(chooser, receiver);
        if (!arm) return nullptr;
        branches.push_back(std::move(*arm));
      }
      if (branches.size() < 2)
        error("SyntaxError", "choice needs at least two arms", sp);
      require_tail("choice");
      if (!receiver) return nullptr;
      return g_comm(chooser, *receiver, std::move(branches), sp);
    }

    // msg from A to B;
    std::string label = expect_ident("message label");
    if (label.empty()) return nullptr;
    auto sort = parse_payload();
    expect_keyword("from");
    Span ssp = peek().span;
    Role sender = use_role(expect_ident("sender role"), ssp);
    expect_keyword("to");
    Span tsp = peek().span;
    Role receiver = use_role(expect_ident("receiver role"), tsp);
    expect(Token::Kind::Semi, "';'");
    GlobalPtr cont = parse_stmts();
    if (!cont) return nullptr;
    return g_comm(sender, receiver, {{Label{label}, *sort, cont}}, sp);
  }

  std::optional<GlobalBranch> parse_choice_arm(const Role& chooser, std::optional<Role>& receiver) {
    if (!expect(Token::Kind::LBrace, "'{'")) return std::nullopt;
    Span sp = peek().span;
    std::string label = expect_ident("message label");
    if (label.empty()) return std::nullopt;
    auto sort = parse_payload();
    expect_keyword("from");
    Span ssp = peek().span;
    Role sender = use_role(expect_ident("sender role"), ssp);
    expect_keyword("to");
    Span tsp = peek().span;
    Role to = use_role(expect_ident("receiver role"), tsp);
    expect(Token::Kind::Semi, "';'");
    if (sender != chooser)
      error("ChoiceArmSender", "choice arm must start with a message from " + chooser.name, ssp);
    if (receiver && to != *receiver)
      error("ChoiceArmReceiver",
            "all arms of a choice must address the same receiver (" + receiver->name + ")", tsp);
    if (!receiver) receiver = to;
    GlobalPtr cont = parse_stmts();
    expect(Token::Kind::RBrace, "'}'");
    if (!cont) return std::nullopt;
    return GlobalBranch{Label{label}, *sort, cont};
  }

  void require_tail(const std::string& what) {
    if (!at(Token::Kind::RBrace) && !at(Token::Kind::Eof))
      error("NotInTailPosition", "'" + what + "' must end its block", peek().span);
  }
};

// ---------------------------------------------------------------------------
// Process script parser

class ProcessParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  std::optional<ProcessScript> parse() {
    ProcessScript script;
    while (!at(Token::Kind::Eof)) {
      if (accept_keyword("role")) {
        Span sp = peek().span;
        std::string name = expect_ident("role name");
        if (name.empty()) return std::nullopt;
        expect(Token::Kind::Assign, "'='");
        ProcessPtr p = parse_proc();
        if (!p) return std::nullopt;
        accept(Token::Kind::Semi);
        if (!script.processes.emplace(Role{name}, p).second)
          error("DuplicateRole", "process for role '" + name + "' defined twice", sp);
        continue;
      }
      if (accept_keyword("queue")) {
        Span sp = peek().span;
        std::string name = expect_ident("role name");
        expect(Token::Kind::Assign, "'='");
        auto msgs = parse_queue_literal();
        accept(Token::Kind::Semi);
        if (!msgs) return std::nullopt;
        if (!script.queues.emplace(Role{name}, std::move(*msgs)).second)
          error("DuplicateQueue", "queue for role '" + name + "' defined twice", sp);
        continue;
      }
      error("SyntaxError", "expected 'role' or 'queue' definition", peek().span);
      return std::nullopt;
    }
    return script;
  }

 private:
  std::set<std::string> proc_binders_;

  std::optional<std::vector<SessionMsg>> parse_queue_literal() {
    if (!expect(Token::Kind::LBracket, "'['")) return std::nullopt;
    std::vector<SessionMsg> msgs;
    if (!accept(Token::Kind::RBracket)) {
      do {
        std::string origin = expect_ident("origin role");
        expect(Token::Kind::Dot, "'.'");
        Span lsp = peek().span;
        std::string label = expect_ident("message label");
        Value v = unit_value();
        if (accept(Token::Kind::LParen)) {
          auto lit = parse_literal();
          if (!lit) return std::nullopt;
          v = *lit;
          expect(Token::Kind::RParen, "')'");
        }
        if (label == kCrashLabel)
          error("CrashLabelSent", "a queue cannot hold a crash message", lsp);
        msgs.push_back({Role{origin}, Label{label}, v});
      } while (accept(Token::Kind::Comma));
      expect(Token::Kind::RBracket, "']'");
    }
    return msgs;
  }

  std::optional<Value> parse_literal() {
    if (at(Token::Kind::Int)) return int_value(std::stoll(advance().text));
    if (at(Token::Kind::String)) return str_value(advance().text);
    if (accept_keyword("true")) return bool_value(true);
    if (accept_keyword("false")) return bool_value(false);
    error("SyntaxError", "expected a literal", peek().span);
    return std::nullopt;
  }

  ProcessPtr parse_proc() {
    Span sp = peek().span;
    if (accept_keyword("end")) return p_inact();
    if (accept_keyword("send")) return parse_send(sp);
    if (accept_keyword("recv")) return parse_recv(sp);
    if (accept_keyword("if")) {
      ExprPtr cond = parse_expr();
      if (!cond) return nullptr;
      expect_keyword("then");
      ProcessPtr then_branch = parse_proc();
      expect_keyword("else");
      ProcessPtr else_branch = parse_proc();
      if (!then_branch || !else_branch) return nullptr;
      return p_if(cond, then_branch, else_branch);
    }
    if (accept_keyword("mu")) {
      std::string var = expect_ident("recursion variable");
      expect(Token::Kind::Dot, "'.'");
      proc_binders_.insert(var);
      ProcessPtr body = parse_proc();
      proc_binders_.erase(var);
      if (!body) return nullptr;
      if (!guarded(body, var))
        error("UnguardedRecursion",
              "recursion variable '" + var + "' must be guarded by a send or receive", sp);
      return p_rec(var, body);
    }
    if (at(Token::Kind::Ident)) {
      std::string name = advance().text;
      if (!proc_binders_.count(name))
        error("FreeProcVar", "process variable '" + name + "' is not bound", sp);
      return p_var(name);
    }
    error("SyntaxError", "expected a process, found '" + describe(peek()) + "'", peek().span);
    return nullptr;
  }

  ProcessPtr parse_send(Span sp) {
    std::vector<Role> targets;
    if (accept(Token::Kind::LBracket)) {
      do targets.push_back(Role{expect_ident("role name")});
      while (accept(Token::Kind::Comma));
      expect(Token::Kind::RBracket, "']'");
    } else {
      targets.push_back(Role{expect_ident("role name")});
    }
    Span lsp = peek().span;
    std::string label = expect_ident("message label");
    if (label == kCrashLabel)
      error("CrashLabelSent", "a process cannot send the crash label", lsp);
    ExprPtr payload = e_lit(unit_value());
    if (accept(Token::Kind::LParen)) {
      payload = parse_expr();
      if (!payload) return nullptr;
      expect(Token::Kind::RParen, "')'");
    }
    expect(Token::Kind::Dot, "'.'");
    ProcessPtr cont = parse_proc();
    if (!cont) return nullptr;
    // Broadcast expands to sequenced sends.
    for (auto it = targets.rbegin(); it != targets.rend(); ++it)
      cont = p_send(*it, Label{label}, payload, cont);
    (void)sp;
    return cont;
  }

  ProcessPtr parse_recv(Span sp) {
    Role from{expect_ident("role name")};
    if (!expect(Token::Kind::LBrace, "'{'")) return nullptr;
    std::vector<ProcBranch> branches;
    std::set<std::string> labels;
    bool crash_seen = false;
    do {
      Span lsp = peek().span;
      std::string label = expect_ident("branch label");
      if (label.empty()) return nullptr;
      if (!labels.insert(label).second)
        error("DuplicateLabel", "duplicate receive branch '" + label + "'", lsp);
      std::optional<std::string> binder;
      if (accept(Token::Kind::LParen)) {
        binder = expect_ident("binder variable");
        expect(Token::Kind::RParen, "')'");
      }
      if (label == kCrashLabel) {
        if (crash_seen) error("DuplicateLabel", "duplicate crash branch", lsp);
        crash_seen = true;
        if (binder) error("CrashBranchBinder", "a crash branch cannot bind a payload", lsp);
      }
      expect(Token::Kind::Arrow, "'->'");
      ProcessPtr cont = parse_proc();
      if (!cont) return nullptr;
      branches.push_back({Label{label}, binder, cont});
    } while (accept(Token::Kind::Comma));
    expect(Token::Kind::RBrace, "'}'");
    if (branches.size() == 1 && crash_seen)
      error("SingletonCrashBranch", "crash cannot be the only receive branch", sp);
    return p_recv(from, std::move(branches));
  }

  // expr := add (('<' | '==') add)?
  ExprPtr parse_expr() {
    ExprPtr lhs = parse_add();
    if (!lhs) return nullptr;
    if (accept(Token::Kind::Less)) {
      ExprPtr rhs = parse_add();
      return rhs ? e_binary(Expr::Op::Less, lhs, rhs) : nullptr;
    }
    if (accept(Token::Kind::EqEq)) {
      ExprPtr rhs = parse_add();
      return rhs ? e_binary(Expr::Op::Eq, lhs, rhs) : nullptr;
    }
    return lhs;
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_unary();
    if (!lhs) return nullptr;
    while (at(Token::Kind::Plus) || at(Token::Kind::Minus)) {
      Expr::Op op = at(Token::Kind::Plus) ? Expr::Op::Add : Expr::Op::Sub;
      advance();
      ExprPtr rhs = parse_unary();
      if (!rhs) return nullptr;
      lhs = e_binary(op, lhs, rhs);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (accept_keyword("not")) {
      ExprPtr operand = parse_unary();
      return operand ? e_not(operand) : nullptr;
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    if (at(Token::Kind::Int)) return e_lit(int_value(std::stoll(advance().text)));
    if (at(Token::Kind::String)) return e_lit(str_value(advance().text));
    if (accept_keyword("true")) return e_lit(bool_value(true));
    if (accept_keyword("false")) return e_lit(bool_value(false));
    if (accept(Token::Kind::LParen)) {
      if (accept(Token::Kind::RParen)) return e_lit(unit_value());
      ExprPtr e = parse_expr();
      expect(Token::Kind::RParen, "')'");
      return e;
    }
    if (at(Token::Kind::Ident)) return e_var(advance().text);
    error("SyntaxError", "expected an expression, found '" + describe(peek()) + "'", peek().span);
    return nullptr;
  }

  // Every occurrence of var must sit under a send or receive prefix.
  static bool guarded(const ProcessPtr& p, const std::string& var) {
    switch (p->kind) {
      case Process::Kind::Inact:
      case Process::Kind::Crashed:
      case Process::Kind::Send:
      case Process::Kind::Recv:
        return true;
      case Process::Kind::Var:
        return p->var != var;
      case Process::Kind::If:
        return guarded(p->then_branch, var) && guarded(p->else_branch, var);
      case Process::Kind::Rec:
        return p->var == var || guarded(p->body, var);
    }
    return true;
  }
};

}  // namespace

ParseResult<ProtocolDecl> parse_protocol(const std::string& source) {
  ParseResult<ProtocolDecl> result;
  auto tokens = lex(source, result.diagnostics);
  if (has_errors(result.diagnostics)) return result;

  ProtocolParser parser(std::move(tokens), result.diagnostics);
  auto decl = parser.parse();
  if (!decl || has_errors(result.diagnostics)) return result;

  auto wf = well_formed(decl->body, decl->reliable_set());
  result.diagnostics.insert(result.diagnostics.end(), wf.begin(), wf.end());
  if (!has_errors(result.diagnostics)) result.value = std::move(*decl);
  return result;
}

ParseResult<ProcessScript> parse_process_script(const std::string& source) {
  ParseResult<ProcessScript> result;
  auto tokens = lex(source, result.diagnostics);
  if (has_errors(result.diagnostics)) return result;

  ProcessParser parser(std::move(tokens), result.diagnostics);
  auto script = parser.parse();
  if (!script || has_errors(result.diagnostics)) return result;
  result.value = std::move(*script);
  return result;
}

Session ProcessScript::to_session() const {
  Session m;
  for (const auto& [role, proc] : processes) {
    SessionEntry entry;
    entry.process = proc;
    auto q = queues.find(role);
    if (q != queues.end()) entry.queue = q->second;
    m.entries[role] = std::move(entry);
  }
  return m;
}

}  // namespace crmpst
