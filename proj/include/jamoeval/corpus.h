#ifndef JAMOEVAL_CORPUS_H_
#define JAMOEVAL_CORPUS_H_

#include <string>
#include <vector>

namespace jamoeval {

// The 73 distinct target words of the two Korean articulation tests plus the
// supplementary words, in table order with repeats removed.
const std::vector<std::string>& ClinicalWordList();

}  // namespace jamoeval

#endif  // JAMOEVAL_CORPUS_H_
