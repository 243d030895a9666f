#pragma once

#include <string>
#include <vector>

namespace tpca {

// Map from the k tensor modes to K factor labels. Labels are 1-based in the
// public fields; label0() gives the 0-based label used for storage.
struct LabelingFunction {
    int k = 0;
    int K = 0;
    std::vector<int> assignment;  // length k, values in 1..K
    std::vector<int> s;           // multiplicity of each label
    int o = 0;                    // number of labels with odd multiplicity

    int label0(int mode0) const { return assignment[mode0] - 1; }
    bool symmetric() const { return K == 1; }
    bool operator==(const LabelingFunction& other) const {
        return assignment == other.assignment;
    }
};

LabelingFunction make_labeling(const std::vector<int>& assignment);

// "1,1,2" or "1-1-2" or "112" (single digit labels only in the last form).
LabelingFunction parse_labeling(const std::string& text);
std::string to_string(const LabelingFunction& lf);

// perm[p] is the original (1-based) mode placed at position p+1 of the
// standard form. Pairs of equal labels come first, unpaired modes last.
struct StandardForm {
    std::vector<int> perm;
    LabelingFunction lf;
    int pairs() const { return (lf.k - lf.o) / 2; }
};

StandardForm standard_form(const LabelingFunction& lf);

// All labellings of k modes up to renaming of labels, in canonical
// first-appearance order (set partitions of the modes).
std::vector<LabelingFunction> all_labelings(int k);

}  // namespace tpca
