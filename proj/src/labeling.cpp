#include "tpca/labeling.hpp"

#include <algorithm>
#include <sstream>

#include "tpca/errors.hpp"

namespace tpca {

LabelingFunction make_labeling(const std::vector<int>& assignment) {
    LabelingFunction lf;
    lf.k = static_cast<int>(assignment.size());
    if (lf.k < 2) throw BadOrder("tensor order must be at least 2, got " + std::to_string(lf.k));
    int K = 0;
    for (int a : assignment) {
        if (a < 1) throw EmptyLabel("labels are 1-based, got " + std::to_string(a));
        K = std::max(K, a);
    }
    lf.K = K;
    lf.assignment = assignment;
    lf.s.assign(K, 0);
    for (int a : assignment) ++lf.s[a - 1];
    for (int i = 0; i < K; ++i) {
        if (lf.s[i] == 0) throw EmptyLabel("label " + std::to_string(i + 1) + " is unused");
        if (lf.s[i] % 2 == 1) ++lf.o;
    }
    return lf;
}

LabelingFunction parse_labeling(const std::string& text) {
    std::vector<int> labels;
    bool has_sep = text.find_first_of(",- ") != std::string::npos;
    if (has_sep) {
        std::string tok;
        std::string cleaned = text;
        std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
        std::replace(cleaned.begin(), cleaned.end(), '-', ' ');
        std::istringstream words(cleaned);
        while (words >> tok) labels.push_back(std::stoi(tok));
    } else {
        for (char c : text) {
            if (c < '0' || c > '9') throw ConfigError("bad labelling '" + text + "'");
            labels.push_back(c - '0');
        }
    }
    return make_labeling(labels);
}

std::string to_string(const LabelingFunction& lf) {
    std::string out;
    for (int i = 0; i < lf.k; ++i) {
        if (i) out += '-';
        out += std::to_string(lf.assignment[i]);
    }
    return out;
}

StandardForm standard_form(const LabelingFunction& lf) {
    // Scan left to right; a mode closes the pending mode of its label.
    std::vector<int> pending(lf.K, -1);
    std::vector<std::pair<int, int>> pairs;
    for (int m = 0; m < lf.k; ++m) {
        int lab = lf.label0(m);
        if (pending[lab] < 0) {
            pending[lab] = m;
        } else {
            pairs.emplace_back(pending[lab], m);
            pending[lab] = -1;
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> leftovers;
    for (int lab = 0; lab < lf.K; ++lab)
        if (pending[lab] >= 0) leftovers.push_back(pending[lab]);
    std::sort(leftovers.begin(), leftovers.end());

    StandardForm sf;
    std::vector<int> labels;
    for (auto [a, b] : pairs) {
        sf.perm.push_back(a + 1);
        sf.perm.push_back(b + 1);
    }
    for (int m : leftovers) sf.perm.push_back(m + 1);
    for (int p : sf.perm) labels.push_back(lf.assignment[p - 1]);
    sf.lf = make_labeling(labels);
    return sf;
}

namespace {

void grow_partitions(int k, std::vector<int>& cur, int max_label,
                     std::vector<LabelingFunction>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(make_labeling(cur));
        return;
    }
    for (int lab = 1; lab <= max_label + 1; ++lab) {
        cur.push_back(lab);
        grow_partitions(k, cur, std::max(max_label, lab), out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<LabelingFunction> all_labelings(int k) {
    if (k < 2) throw BadOrder("k must be at least 2");
    std::vector<LabelingFunction> out;
    std::vector<int> cur{1};
    grow_partitions(k, cur, 1, out);
    return out;
}

}  // namespace tpca
