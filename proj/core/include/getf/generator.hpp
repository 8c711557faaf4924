#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "getf/model.hpp"

namespace getf {

enum class DagFamily { Layered, ForkJoin, RandomDag };
enum class SelfComm { Matrix, Infinite };
enum class WeightMode { Zero, Uniform, SinkOnly };

struct Range {
    double lo = 1.0;
    double hi = 1.0;
};

struct GeneratorSpec {
    DagFamily family = DagFamily::RandomDag;
    std::size_t tasks = 10;
    std::size_t machines = 2;
    double density = 0.3;
    Range demand{1.0, 10.0};
    Range speed{1.0, 4.0};
    Range comm{1.0, 4.0};
    Range data{0.0, 5.0};
    SelfComm self_comm = SelfComm::Matrix;
    bool zero_comm = false; // every communication speed infinite
    WeightMode weights = WeightMode::Zero;
    std::uint64_t seed = 0;
};

/// Throws ModelError for an unusable spec.
void validate_spec(const GeneratorSpec& spec);

/// Acyclic by construction: edges run from lower to higher ids. Values are
/// rounded to three decimals, so the JSON form is stable. With SinkOnly
/// weights a unit-demand task with weight one is appended after every sink
/// (zero-data edges) and all other weights are zero.
Instance generate_instance(const GeneratorSpec& spec);

DagFamily parse_family(const std::string& text);
SelfComm parse_self_comm(const std::string& text);
WeightMode parse_weight_mode(const std::string& text);
/// "lo:hi" or a single value.
Range parse_range(const std::string& text);

const char* to_string(DagFamily f);
const char* to_string(SelfComm s);
const char* to_string(WeightMode w);

} // namespace getf
