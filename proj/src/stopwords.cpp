#include "icorate/topics.hpp"

namespace icorate {

const std::vector<std::string>& stopwords() {
  static const std::vector<std::string> words = {
      "a", "able", "about", "above", "across", "after", "afterwards", "again", "against", "ago",
      "ah", "all", "almost", "alone", "along", "already", "also", "although", "always", "am",
      "among", "amongst", "an", "and", "another", "any", "anybody", "anyhow", "anyone", "anything",
      "anyway", "anywhere", "apart", "appear", "appreciate", "appropriate", "are", "around", "as", "aside",
      "ask", "asking", "associated", "at", "available", "away", "awfully", "back", "be", "became",
      "because", "become", "becomes", "becoming", "been", "before", "beforehand", "behind", "being", "below",
      "beside", "besides", "between", "beyond", "both", "but", "by", "can", "cannot", "could",
      "did", "do", "does", "doing", "done", "down", "during", "each", "eg", "either",
      "else", "elsewhere", "enough", "etc", "even", "ever", "every", "everyone", "everything", "everywhere",
      "except", "few", "for", "former", "formerly", "from", "further", "get", "gets", "getting",
      "give", "given", "gives", "go", "goes", "going", "had", "has", "have", "having",
      "he", "hence", "her", "here", "hereafter", "hereby", "herein", "hers", "herself", "him",
      "himself", "his", "how", "however", "i", "ie", "if", "in", "indeed", "into",
      "is", "it", "its", "itself", "just", "keep", "last", "latter", "latterly", "least",
      "less", "let", "like", "made", "make", "makes", "many", "may", "me", "meanwhile",
      "might", "mine", "more", "moreover", "most", "mostly", "much", "must", "my", "myself",
      "namely", "neither", "never", "nevertheless", "next", "no", "nobody", "none", "noone", "nor",
      "not", "nothing", "now", "nowhere", "of", "off", "often", "on", "once", "one",
      "only", "onto", "or", "other", "others", "otherwise", "our", "ours", "ourselves", "out",
      "over", "own", "per", "perhaps", "please", "put", "rather", "re", "really", "said",
      "same", "say", "says", "see", "seem", "seemed", "seeming", "seems", "several", "she",
      "should", "show", "since", "so", "some", "somehow", "someone", "something", "sometime", "sometimes",
      "somewhere", "still", "such", "than", "that", "the", "their", "theirs", "them", "themselves",
      "then", "thence", "there", "thereafter", "thereby", "therefore", "therein", "thereupon", "these", "they",
      "this", "those", "though", "through", "throughout", "thru", "thus", "to", "together", "too",
      "toward", "towards", "under", "until", "up", "upon", "us", "use", "used", "uses",
      "using", "very", "via", "was", "we", "well", "were", "what", "whatever", "when",
      "whence", "whenever", "where", "whereafter", "whereas", "whereby", "wherein", "whereupon", "wherever", "whether",
      "which", "while", "whither", "who", "whoever", "whole", "whom", "whose", "why", "will",
      "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself", "yourselves",
  };
  return words;
}

}  // namespace icorate
