#include <cassert>
#include <sstream>

#include "crmpst/frontend.hpp"

namespace crmpst {

namespace {

std::string payload_suffix(Sort s) {
  return s == Sort::Unit ? std::string() : "(" + to_string(s) + ")";
}

void render_local_into(const LocalPtr& t, std::string& out) {
  switch (t->kind) {
    case LocalType::Kind::End:
      out += "end";
      return;
    case LocalType::Kind::Stop:
      out += "stop";
      return;
    case LocalType::Kind::RecVar:
      out += t->var;
      return;
    case LocalType::Kind::Rec:
      out += "mu " + t->var + ". ";
      render_local_into(t->body, out);
      return;
    case LocalType::Kind::Select:
    case LocalType::Kind::Branch: {
      out += t->peer.name;
      out += t->kind == LocalType::Kind::Select ? "(+)" : "&";
      if (t->branches.size() == 1) {
        const auto& b = t->branches.front();
        out += b.label.name + payload_suffix(b.sort) + ". ";
        render_local_into(b.cont, out);
      } else {
        out += "{ ";
        for (std::size_t i = 0; i < t->branches.size(); ++i) {
          if (i) out += " , ";
          const auto& b = t->branches[i];
          out += b.label.name + payload_suffix(b.sort) + ". ";
          render_local_into(b.cont, out);
        }
        out += " }";
      }
      return;
    }
  }
}

void render_global_into(const GlobalPtr& g, std::string& out) {
  switch (g->kind) {
    case GlobalType::Kind::End:
      out += "end";
      return;
    case GlobalType::Kind::RecVar:
      out += g->var;
      return;
    case GlobalType::Kind::Rec:
      out += "mu " + g->var + ". ";
      render_global_into(g->body, out);
      return;
    case GlobalType::Kind::Comm:
      break;
  }

  out += g->sender.name;
  if (g->sender_crashed) out += "#";
  out += g->committed ? "~>" : "->";
  out += g->receiver.name;
  if (g->receiver_crashed) out += "#";

  if (g->committed) {
    // Only the selected branch is displayed; the receiver will take it.
    const auto& b = g->branches[*g->committed];
    out += ":" + b.label.name + payload_suffix(b.sort) + ". ";
    render_global_into(b.cont, out);
    return;
  }
  if (g->branches.size() == 1) {
    const auto& b = g->branches.front();
    out += ":" + b.label.name + payload_suffix(b.sort) + ". ";
    render_global_into(b.cont, out);
    return;
  }
  out += "{ ";
  for (std::size_t i = 0; i < g->branches.size(); ++i) {
    if (i) out += " , ";
    const auto& b = g->branches[i];
    out += b.label.name + payload_suffix(b.sort) + ". ";
    render_global_into(b.cont, out);
  }
  out += " }";
}

void indent_into(std::string& out, int depth) {
  for (int i = 0; i < depth; ++i) out += "  ";
}

void render_source_into(const GlobalPtr& g, std::string& out, int depth) {
  switch (g->kind) {
    case GlobalType::Kind::End:
      indent_into(out, depth);
      out += "end;\n";
      return;
    case GlobalType::Kind::RecVar:
      indent_into(out, depth);
      out += "continue " + g->var + ";\n";
      return;
    case GlobalType::Kind::Rec:
      indent_into(out, depth);
      out += "rec " + g->var + " {\n";
      render_source_into(g->body, out, depth + 1);
      indent_into(out, depth);
      out += "}\n";
      return;
    case GlobalType::Kind::Comm:
      break;
  }

  assert(!g->committed && !g->sender_crashed && !g->receiver_crashed &&
         "runtime constructs have no source form");
  if (g->branches.size() == 1) {
    const auto& b = g->branches.front();
    indent_into(out, depth);
    out += b.label.name + payload_suffix(b.sort) + " from " + g->sender.name + " to " +
           g->receiver.name + ";\n";
    render_source_into(b.cont, out, depth);
    return;
  }
  indent_into(out, depth);
  out += "choice at " + g->sender.name + " {\n";
  for (std::size_t i = 0; i < g->branches.size(); ++i) {
    const auto& b = g->branches[i];
    if (i) {
      indent_into(out, depth);
      out += "} or {\n";
    }
    indent_into(out, depth + 1);
    out += b.label.name + payload_suffix(b.sort) + " from " + g->sender.name + " to " +
           g->receiver.name + ";\n";
    render_source_into(b.cont, out, depth + 1);
  }
  indent_into(out, depth);
  out += "}\n";
}

}  // namespace

std::string render_local(const LocalPtr& t) {
  std::string out;
  render_local_into(t, out);
  return out;
}

std::string render_global(const GlobalPtr& g) {
  std::string out;
  render_global_into(g, out);
  return out;
}

std::string render_global_source(const GlobalPtr& g, int indent) {
  std::string out;
  render_source_into(g, out, indent);
  return out;
}

std::string render_protocol_source(const ProtocolDecl& decl) {
  std::string out = "global protocol " + decl.name + "(";
  for (std::size_t i = 0; i < decl.roles.size(); ++i) {
    if (i) out += ", ";
    if (decl.roles[i].second) out += "reliable ";
    out += "role " + decl.roles[i].first.name;
  }
  out += ") {\n";
  out += render_global_source(decl.body, 1);
  out += "}\n";
  return out;
}

std::string to_string(const TransitionLabel& l) {
  switch (l.kind) {
    case TransitionLabel::Kind::Send:
      return l.a.name + "->" + l.b.name + ":" + l.label.name + payload_suffix(l.sort);
    case TransitionLabel::Kind::Recv:
      return l.a.name + "<-" + l.b.name + ":" + l.label.name + payload_suffix(l.sort);
    case TransitionLabel::Kind::Crash:
      return "crash(" + l.a.name + ")";
    case TransitionLabel::Kind::CrashDetect:
      return "detect(" + l.a.name + "," + l.b.name + ")";
  }
  return "?";
}

}  // namespace crmpst
