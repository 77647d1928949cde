#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "icorate/synthetic.hpp"
#include "icorate/topics.hpp"

namespace icorate::testing {

struct TopicMatch {
  std::vector<int> planted_for_topic;  // -1 when unmatched
  double purity = 0.0;                 // mean share of matched top words that are planted words
};

/// Greedy matching: repeatedly pair the (learned, planted) topics with the largest top-word
/// overlap. Purity is averaged over the planted topics.
inline TopicMatch match_topics(const TopicModel& model, const std::vector<PlantedTopic>& planted, std::size_t n) {
  const auto K = static_cast<std::size_t>(model.topics());
  std::vector<std::vector<std::size_t>> overlap(K, std::vector<std::size_t>(planted.size(), 0));
  for (std::size_t k = 0; k < K; ++k) {
    const auto top = top_words(model, static_cast<Index>(k), n);
    for (std::size_t p = 0; p < planted.size(); ++p) {
      const std::set<std::string> words(planted[p].words.begin(), planted[p].words.end());
      overlap[k][p] = static_cast<std::size_t>(std::count_if(top.begin(), top.end(), [&](const auto& w) { return words.contains(w); }));
    }
  }
  TopicMatch m;
  m.planted_for_topic.assign(K, -1);
  std::vector<bool> used(planted.size(), false);
  double total = 0.0;
  for (std::size_t round = 0; round < std::min(K, planted.size()); ++round) {
    std::size_t bk = 0, bp = 0;
    long best = -1;
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t p = 0; p < planted.size(); ++p)
        if (m.planted_for_topic[k] < 0 && !used[p] && static_cast<long>(overlap[k][p]) > best) {
          best = static_cast<long>(overlap[k][p]);
          bk = k;
          bp = p;
        }
    m.planted_for_topic[bk] = static_cast<int>(bp);
    used[bp] = true;
    total += static_cast<double>(overlap[bk][bp]) / static_cast<double>(n);
  }
  m.purity = total / static_cast<double>(planted.size());
  return m;
}

inline std::vector<TokenizedDoc> white_papers(const SyntheticCorpus& data) {
  std::vector<TokenizedDoc> docs;
  for (const auto& d : data.dossiers) docs.push_back(tokenize(*d.white_paper));
  return docs;
}

}  // namespace icorate::testing
