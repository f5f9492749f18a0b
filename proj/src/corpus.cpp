#include "archner/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "archner/error.hpp"
#include "archner/text.hpp"

namespace archner {

std::vector<std::string> Sentence::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<BioLabel> Sentence::gold_labels() const {
  std::vector<BioLabel> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!t.gold) throw Error("token '" + t.surface + "' has no gold label");
    out.push_back(*t.gold);
  }
  return out;
}

std::size_t TaggedDocument::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

void check_shape(const std::vector<TaggedDocument>& docs, const DocLabels& labels) {
  if (docs.size() != labels.size()) {
    throw Error("label set has " + std::to_string(labels.size()) + " documents, corpus has " +
                std::to_string(docs.size()));
  }
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto& sents = docs[d].sentences;
    if (sents.size() != labels[d].size()) {
      throw Error("document " + docs[d].doc_id + ": sentence count mismatch");
    }
    for (std::size_t s = 0; s < sents.size(); ++s) {
      if (sents[s].size() != labels[d][s].size()) {
        throw Error("document " + docs[d].doc_id + " sentence " + std::to_string(s + 1) +
                    ": expected " + std::to_string(sents[s].size()) + " labels, got " +
                    std::to_string(labels[d][s].size()));
      }
    }
  }
}

void check_shape(const DocLabels& a, const DocLabels& b) {
  if (a.size() != b.size()) throw Error("label sets differ in document count");
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d].size() != b[d].size()) {
      throw Error("label sets differ in sentence count at document " + std::to_string(d + 1));
    }
    for (std::size_t s = 0; s < a[d].size(); ++s) {
      if (a[d][s].size() != b[d][s].size()) {
        throw Error("label sets differ in length at document " + std::to_string(d + 1) +
                    " sentence " + std::to_string(s + 1));
      }
    }
  }
}

DocLabels gold_labels(const std::vector<TaggedDocument>& docs) {
  DocLabels out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    auto& d = out.emplace_back();
    for (const auto& s : doc.sentences) d.push_back(s.gold_labels());
  }
  return out;
}

std::vector<BioLabel> flatten(const DocLabels& labels) {
  std::vector<BioLabel> out;
  for (const auto& d : labels)
    for (const auto& s : d) out.insert(out.end(), s.begin(), s.end());
  return out;
}

namespace {

constexpr std::string_view kDocSentinel = "#doc";

bool is_doc_line(std::string_view line) {
  return line.substr(0, kDocSentinel.size()) == kDocSentinel &&
         (line.size() == kDocSentinel.size() || line[kDocSentinel.size()] == ' ') &&
         line.find('\t') == std::string_view::npos;
}

std::optional<BioLabel> parse_label_column(std::string_view col, std::size_t line_no) {
  if (col.empty() || col == "_") return std::nullopt;
  auto label = parse_label(col);
  if (!label) throw ParseError(line_no, "malformed label '" + std::string(col) + "'");
  return label;
}

}  // namespace

ConllFile read_conll_file(std::istream& in) {
  ConllFile file;
  DocLabels preds;
  bool all_have_pred = true;
  bool any_token = false;

  TaggedDocument* doc = nullptr;
  Sentence sentence;
  std::vector<BioLabel> sentence_preds;
  std::size_t doc_start_line = 0;

  auto flush_sentence = [&] {
    if (sentence.tokens.empty()) return;
    doc->sentences.push_back(std::move(sentence));
    preds.back().push_back(std::move(sentence_preds));
    sentence = {};
    sentence_preds = {};
  };
  auto close_doc = [&] {
    if (!doc) return;
    flush_sentence();
    if (doc->sentences.empty()) {
      throw ParseError(doc_start_line, "document '" + doc->doc_id + "' has no tokens");
    }
  };
  auto open_doc = [&](std::string id, std::size_t line_no) {
    close_doc();
    file.docs.push_back({std::move(id), {}});
    preds.emplace_back();
    doc = &file.docs.back();
    doc_start_line = line_no;
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_doc_line(line)) {
      auto id = std::string(text::trim(line.substr(kDocSentinel.size())));
      if (id.empty()) throw ParseError(line_no, "#doc line without an id");
      open_doc(std::move(id), line_no);
      continue;
    }
    if (text::trim(line).empty()) {
      if (doc) flush_sentence();
      continue;
    }
    if (!doc) open_doc("doc", line_no);
    const auto cols = text::split(line, '\t');
    Token tok;
    tok.surface = std::string(cols[0]);
    if (tok.surface.empty() || tok.surface.find_first_of(" \t\r\n\f\v") != std::string::npos) {
      throw ParseError(line_no, "empty or whitespace-containing token '" + tok.surface + "'");
    }
    if (cols.size() > 1) tok.pos = std::string(cols[1]);
    if (cols.size() > 2) tok.gold = parse_label_column(cols[2], line_no);
    if (cols.size() > 3) {
      auto pred = parse_label_column(cols[3], line_no);
      if (!pred) throw ParseError(line_no, "empty prediction column");
      sentence_preds.push_back(*pred);
    } else {
      all_have_pred = false;
    }
    sentence.tokens.push_back(std::move(tok));
    any_token = true;
  }
  close_doc();
  if (any_token && all_have_pred) file.predictions = std::move(preds);
  return file;
}

std::vector<TaggedDocument> read_conll(std::istream& in) { return read_conll_file(in).docs; }

std::vector<TaggedDocument> read_conll(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_conll(in);
}

ConllFile load_conll_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_conll_file(in);
}

std::vector<TaggedDocument> load_conll(const std::string& path) {
  return load_conll_file(path).docs;
}

std::string write_conll(const std::vector<TaggedDocument>& docs, const DocLabels* predictions) {
  if (predictions) check_shape(docs, *predictions);
  std::ostringstream out;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    out << kDocSentinel << ' ' << docs[d].doc_id << '\n';
    const auto& sents = docs[d].sentences;
    for (std::size_t s = 0; s < sents.size(); ++s) {
      for (std::size_t t = 0; t < sents[s].tokens.size(); ++t) {
        const auto& tok = sents[s].tokens[t];
        out << tok.surface << '\t' << tok.pos;
        if (predictions) {
          out << '\t' << (tok.gold ? tok.gold->str() : "_") << '\t'
              << (*predictions)[d][s][t].str();
        } else if (tok.gold) {
          out << '\t' << tok.gold->str();
        }
        out << '\n';
      }
      out << '\n';
    }
  }
  return out.str();
}

TaggedDocument split_long_sentences(const TaggedDocument& doc, std::size_t soft_limit,
                                    std::size_t hard_limit) {
  if (soft_limit >= hard_limit) throw Error("soft limit must be below hard limit");
  auto is_break = [](const std::string& s) { return s == "." || s == ";" || s == ","; };

  TaggedDocument out{doc.doc_id, {}};
  for (const auto& sentence : doc.sentences) {
    auto begin = sentence.tokens.begin();
    const auto end = sentence.tokens.end();
    while (static_cast<std::size_t>(end - begin) > hard_limit) {
      std::size_t cut = hard_limit;
      for (std::size_t pos = hard_limit; pos > soft_limit; --pos) {
        if (is_break(begin[pos - 1].surface)) {
          cut = pos;
          break;
        }
      }
      out.sentences.push_back({{begin, begin + cut}});
      begin += cut;
    }
    out.sentences.push_back({{begin, end}});
  }
  return out;
}

std::vector<std::size_t> FoldSplit::fold_token_sums(const std::vector<TaggedDocument>& docs) const {
  std::vector<std::size_t> sums(k, 0);
  for (const auto& d : docs) {
    auto it = fold_of_doc.find(d.doc_id);
    if (it == fold_of_doc.end()) throw Error("document " + d.doc_id + " is not in the fold split");
    sums.at(it->second) += d.token_count();
  }
  return sums;
}

std::string FoldSplit::to_csv() const {
  std::ostringstream out;
  out << "doc_id,fold\n";
  for (const auto& [doc, fold] : fold_of_doc) out << doc << ',' << fold << '\n';
  return out.str();
}

FoldSplit FoldSplit::from_csv(std::istream& in) {
  FoldSplit split;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || (line_no == 1 && line == "doc_id,fold")) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string_view::npos) throw ParseError(line_no, "expected doc_id,fold");
    std::size_t fold = 0;
    try {
      fold = std::stoul(std::string(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError(line_no, "fold is not a number");
    }
    if (!split.fold_of_doc.emplace(std::string(line.substr(0, comma)), fold).second) {
      throw ParseError(line_no, "duplicate document");
    }
    split.k = std::max(split.k, fold + 1);
  }
  return split;
}

FoldSplit make_folds(const std::vector<TaggedDocument>& docs, std::size_t k) {
  if (k < 2) throw Error("need at least 2 folds");
  if (docs.size() < k) {
    throw Error("cannot split " + std::to_string(docs.size()) + " documents into " +
                std::to_string(k) + " folds");
  }
  std::vector<const TaggedDocument*> order;
  std::set<std::string> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.doc_id).second) throw Error("duplicate document id " + d.doc_id);
    order.push_back(&d);
  }
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    const auto ca = a->token_count();
    const auto cb = b->token_count();
    if (ca != cb) return ca > cb;
    return a->doc_id < b->doc_id;
  });

  FoldSplit split;
  split.k = k;
  std::vector<std::size_t> load(k, 0);
  for (const auto* d : order) {
    const auto lightest =
        static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    load[lightest] += d->token_count();
    split.fold_of_doc[d->doc_id] = lightest;
  }
  return split;
}

}  // namespace archner
