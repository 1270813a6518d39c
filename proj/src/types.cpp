#include "adarag/types.hpp"

namespace adarag {

std::optional<ComplexityLabel> label_from_string(const std::string& s) {
    if (s == "A") return ComplexityLabel::A;
    if (s == "B") return ComplexityLabel::B;
    if (s == "C") return ComplexityLabel::C;
    return std::nullopt;
}

std::string strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::non_retrieval: return "non_retrieval";
        case StrategyKind::single_retrieval: return "single_retrieval";
        case StrategyKind::multi_retrieval: return "multi_retrieval";
    }
    return "unknown";
}

}  // namespace adarag
