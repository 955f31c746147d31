#include "graphpipe/representation.hpp"

#include <array>
#include <cstdlib>
#include <sstream>

namespace graphpipe {

namespace {

constexpr std::string_view kArrowUtf8 = "→";  // →

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return done() ? '\0' : text[pos]; }
  void skip_spaces() {
    while (!done() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }
  bool eat(std::string_view s) {
    if (text.substr(pos, s.size()) != s) return false;
    pos += s.size();
    return true;
  }

  std::optional<NodeId> node_id() {
    std::size_t start = pos;
    while (!done() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start || pos - start > 10) return std::nullopt;
    errno = 0;
    unsigned long long v =
        std::strtoull(std::string(text.substr(start, pos - start)).c_str(),
                      nullptr, 10);
    if (errno != 0 || v > 0xffffffffULL) return std::nullopt;
    return static_cast<NodeId>(v);
  }

  // Decimal rational: digits with an optional fractional part. A dot only
  // counts when a digit follows, so sentence-ending periods stay untouched.
  std::optional<double> weight() {
    std::size_t start = pos;
    while (!done() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
    if (pos + 1 < text.size() && text[pos] == '.' && text[pos + 1] >= '0' &&
        text[pos + 1] <= '9') {
      ++pos;
      while (!done() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
    return parse_number(text.substr(start, pos - start));
  }
};

void validate_rep(const Representation& rep) {
  if (rep.kind == RepKind::LinguisticDescription) {
    if (!rep.predicate) {
      fail(Errc::MissingPredicate,
           "linguistic description requires a predicate");
    }
  } else if (rep.predicate) {
    fail(Errc::BadConfig, "predicate only applies to linguistic descriptions");
  }
}

}  // namespace

std::string_view rep_kind_name(RepKind k) {
  switch (k) {
    case RepKind::AdjacencyList: return "AdjacencyList";
    case RepKind::SymbolicNotation: return "SymbolicNotation";
    case RepKind::LinguisticDescription: return "LinguisticDescription";
  }
  return "?";
}

std::string_view predicate_name(Predicate p) {
  switch (p) {
    case Predicate::Linked: return "Linked";
    case Predicate::Followed: return "Followed";
    case Predicate::Connected: return "Connected";
    case Predicate::Cited: return "Cited";
  }
  return "?";
}

std::optional<RepKind> rep_kind_from(std::string_view name) {
  if (name == "AdjacencyList" || name == "adjacency" || name == "adjacency_list")
    return RepKind::AdjacencyList;
  if (name == "SymbolicNotation" || name == "symbolic")
    return RepKind::SymbolicNotation;
  if (name == "LinguisticDescription" || name == "linguistic")
    return RepKind::LinguisticDescription;
  return std::nullopt;
}

std::optional<Predicate> predicate_from(std::string_view name) {
  if (name == "Linked") return Predicate::Linked;
  if (name == "Followed") return Predicate::Followed;
  if (name == "Connected") return Predicate::Connected;
  if (name == "Cited") return Predicate::Cited;
  return std::nullopt;
}

bool operator==(const Representation& a, const Representation& b) {
  return a.kind == b.kind && a.predicate == b.predicate;
}

RenderedChunk render(std::span<const Edge> edges, const Representation& rep) {
  validate_rep(rep);
  if (edges.empty()) fail(Errc::EmptyEdgeSet, "cannot render an empty edge set");
  bool weighted = edges.front().w.has_value();
  for (const Edge& e : edges) {
    if (e.w.has_value() != weighted) {
      fail(Errc::MixedWeighting, "edges mix weighted and unweighted forms");
    }
  }

  std::ostringstream out;
  bool first = true;
  for (const Edge& e : edges) {
    switch (rep.kind) {
      case RepKind::AdjacencyList:
        if (!first) out << ",";
        out << "[" << e.u << "," << e.v;
        if (e.w) out << "," << format_number(*e.w);
        out << "]";
        break;
      case RepKind::SymbolicNotation:
        if (!first) out << ", ";
        out << e.u << kArrowUtf8 << e.v;
        if (e.w) out << ":" << format_number(*e.w);
        break;
      case RepKind::LinguisticDescription:
        if (!first) out << ". ";
        out << "Node " << e.u << " is " << predicate_name(*rep.predicate)
            << " to node " << e.v;
        if (e.w) out << " with weight " << format_number(*e.w);
        break;
    }
    first = false;
  }

  RenderedChunk chunk;
  chunk.text = out.str();
  chunk.representation = rep;
  chunk.edge_count = edges.size();
  chunk.weighted = weighted;
  return chunk;
}

ExtractResult scan_adjacency_items(std::string_view text) {
  ExtractResult out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '[') {
      ++pos;
      continue;
    }
    std::size_t item_start = pos;
    Cursor c{text, pos + 1};
    c.skip_spaces();
    auto u = c.node_id();
    c.skip_spaces();
    bool comma1 = c.eat(',');
    c.skip_spaces();
    auto v = c.node_id();
    c.skip_spaces();
    std::optional<double> w;
    bool ok = u && comma1 && v;
    if (ok && c.eat(',')) {
      c.skip_spaces();
      w = c.weight();
      c.skip_spaces();
      ok = w.has_value();
    }
    if (ok && c.eat(']')) {
      out.edges.push_back(Edge{*u, *v, w});
      pos = c.pos;
    } else {
      out.malformed_offsets.push_back(item_start);
      ++pos;
    }
  }
  return out;
}

namespace {

ExtractResult scan_symbolic_items(std::string_view text) {
  ExtractResult out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t arrow = std::string_view::npos;
    std::size_t arrow_len = 0;
    std::size_t a1 = text.find(kArrowUtf8, pos);
    std::size_t a2 = text.find("->", pos);
    if (a1 != std::string_view::npos && (a2 == std::string_view::npos || a1 < a2)) {
      arrow = a1;
      arrow_len = kArrowUtf8.size();
    } else if (a2 != std::string_view::npos) {
      arrow = a2;
      arrow_len = 2;
    }
    if (arrow == std::string_view::npos) break;

    // Left side: digits immediately before the arrow (spaces allowed).
    std::size_t left_end = arrow;
    while (left_end > pos && (text[left_end - 1] == ' ' || text[left_end - 1] == '\t'))
      --left_end;
    std::size_t left_start = left_end;
    while (left_start > pos && text[left_start - 1] >= '0' &&
           text[left_start - 1] <= '9')
      --left_start;

    Cursor c{text, arrow + arrow_len};
    c.skip_spaces();
    auto v = c.node_id();
    std::optional<double> w;
    bool ok = left_start < left_end && v.has_value();
    if (ok) {
      Cursor probe = c;
      probe.skip_spaces();
      if (probe.eat(':')) {
        probe.skip_spaces();
        w = probe.weight();
        ok = w.has_value();
        if (ok) c = probe;
      }
    }
    std::optional<NodeId> u;
    if (ok) {
      Cursor left{text.substr(left_start, left_end - left_start), 0};
      u = left.node_id();
      ok = u.has_value() && left.done();
    }
    if (ok) {
      out.edges.push_back(Edge{*u, *v, w});
      pos = c.pos;
    } else {
      out.malformed_offsets.push_back(arrow);
      pos = arrow + arrow_len;
    }
  }
  return out;
}

ExtractResult scan_linguistic_items(std::string_view text) {
  ExtractResult out;
  static constexpr std::array<std::string_view, 4> kPredicates = {
      "Linked", "Followed", "Connected", "Cited"};
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t at = text.find("Node ", pos);
    if (at == std::string_view::npos) break;
    Cursor c{text, at + 5};
    c.skip_spaces();
    auto u = c.node_id();
    bool ok = u.has_value();
    ok = ok && (c.skip_spaces(), c.eat("is"));
    c.skip_spaces();
    std::optional<Predicate> pred;
    if (ok) {
      for (std::size_t i = 0; i < kPredicates.size(); ++i) {
        if (c.eat(kPredicates[i])) {
          pred = static_cast<Predicate>(i);
          break;
        }
      }
      ok = pred.has_value();
    }
    ok = ok && (c.skip_spaces(), c.eat("to"));
    ok = ok && (c.skip_spaces(), c.eat("node"));
    c.skip_spaces();
    std::optional<NodeId> v;
    if (ok) {
      v = c.node_id();
      ok = v.has_value();
    }
    std::optional<double> w;
    if (ok) {
      Cursor probe = c;
      probe.skip_spaces();
      if (probe.eat("with")) {
        probe.skip_spaces();
        ok = probe.eat("weight");
        probe.skip_spaces();
        if (ok) {
          w = probe.weight();
          ok = w.has_value();
        }
        if (ok) c = probe;
      }
    }
    if (ok) {
      out.edges.push_back(Edge{*u, *v, w});
      pos = c.pos;
    } else {
      out.malformed_offsets.push_back(at);
      pos = at + 5;
    }
  }
  return out;
}

}  // namespace

std::vector<Edge> parse_adjacency_list(std::string_view text) {
  ExtractResult r = scan_adjacency_items(text);
  if (!r.malformed_offsets.empty()) {
    fail(Errc::MalformedItem, "malformed adjacency item",
         r.malformed_offsets.front());
  }
  if (r.edges.empty()) fail(Errc::NoEdgesFound, "no adjacency items found");
  return std::move(r.edges);
}

ExtractResult scan_any(std::string_view text, const Representation& rep) {
  validate_rep(rep);
  switch (rep.kind) {
    case RepKind::AdjacencyList: return scan_adjacency_items(text);
    case RepKind::SymbolicNotation: return scan_symbolic_items(text);
    case RepKind::LinguisticDescription: return scan_linguistic_items(text);
  }
  fail(Errc::BadConfig, "unknown representation kind");
}

std::vector<Edge> parse_any(std::string_view text, const Representation& rep) {
  ExtractResult r = scan_any(text, rep);
  if (!r.malformed_offsets.empty()) {
    fail(Errc::MalformedItem, "malformed edge item",
         r.malformed_offsets.front());
  }
  if (r.edges.empty()) fail(Errc::NoEdgesFound, "no edge items found");
  return std::move(r.edges);
}

}  // namespace graphpipe
