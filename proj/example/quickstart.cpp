// Solve bays29 with the dynamic elitist colony (median threshold) and print the tour.

#include <iostream>

#include "eaco/engine.hpp"
#include "eaco/report.hpp"

int main() {
    auto inst = std::make_shared<eaco::Instance>(eaco::load_instance(EACO_DATA_DIR "/tsplib/bays29.tsp"));

    eaco::RunConfig cfg;
    cfg.instance = inst;
    cfg.params.num_ants = 10;
    cfg.params.max_iterations = 1000;
    cfg.plan.variant = eaco::Variant::dea;
    cfg.plan.classifier = eaco::ThresholdKind::mets;
    cfg.seed = 7;

    const auto result = eaco::run(cfg);
    std::cout << "best length " << result.best.length << " ("
              << eaco::format_fixed(eaco::deviation_pct(result.best.length, 2020.0), 2) << "% above 2020)\n";
    for (auto c : result.best.perm) {
        std::cout << c + 1 << ' ';
    }
    std::cout << '\n';
}
