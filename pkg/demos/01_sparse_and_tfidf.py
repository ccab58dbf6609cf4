# Walk through the CSR container and the TF-IDF featurizer on tiny inputs.
import numpy as np

from sarcbench import sparse
from sarcbench.features import (FeaturizerConfig, char_ngrams, english_stop_words, fit,
                                fit_vocabulary, stylometrics, tokenize_words, transform_tfidf,
                                word_ngrams)

d = np.array([[0.0, 2.0, 0.0], [1.0, 0.0, 3.0]])
m = sparse.from_dense(d)
print(m.shape, m.nnz)            # (2, 3) 3
print(m.row_offsets, m.col_indices, m.values)
print(m.dot(np.ones(3)))         # row sums -> [2. 4.]
print(m.tdot(np.ones(2)))        # column sums -> [1. 2. 3.]

both = sparse.hstack([m, m])
print(both.shape)                # (2, 6)
left, right = sparse.hsplit(both, [3, 3])
print(np.array_equal(left.toarray(), d))
unit = sparse.l2_normalize_rows(m)
print(np.linalg.norm(unit.toarray(), axis=1))

# words: lowercase, drop stop words, then 1- and 2-grams
text = "Oh great, ANOTHER Monday. Just what I needed"
print(tokenize_words(text))
toks = tokenize_words(text, stop_words=english_stop_words())
print(toks)                      # 'another' and 'what' are gone
print(word_ngrams(toks, (1, 2)))
print(char_ngrams("so fun", (3, 3)))   # spaces are kept

docs = [["good", "good", "day"], ["bad", "day"], ["good", "night"]]
vocab = fit_vocabulary(docs, max_features=3)
print(vocab.terms, np.round(vocab.idf, 4))
print(np.round(transform_tfidf(vocab, docs).toarray(), 4))

print(stylometrics(["WOW!! Really??", "fine."]))

replies = ["yeah because that always works", "thanks for the help",
           "oh sure, great idea!!", "the game starts at noon"]
feat = fit(FeaturizerConfig(max_features_word=50, max_features_char=50), replies)
X = feat.transform(replies)
print(feat.block_widths, X.shape)
