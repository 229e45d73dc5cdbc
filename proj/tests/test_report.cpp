#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>

#include "socketbench/error.hpp"
#include "socketbench/report.hpp"
#include "test_support.hpp"

using namespace socketbench;
using namespace socketbench::report;
using catalog::Region;
using gait::Joint;
using gait::Side;

namespace {

const ComparisonReport& fixture_report() {
    static const auto r = compare(load_manifest(fixture("comparison.json")));
    return r;
}

}  // namespace

TEST_CASE("manifest") {
    const auto m = load_manifest(fixture("comparison.json"));
    CHECK(m.candidate.id == "i-socket");
    CHECK(m.reference.id == "POS");
    CHECK(m.candidate.gait_trials.size() == 3);
    CHECK(m.candidate.pressure_frames.is_absolute());
    CHECK(std::filesystem::exists(m.reference.pressure_mask));
    CHECK(m.pressure_regions == std::vector<Region>{Region::tibia, Region::fibula});
    REQUIRE(m.static_test);
    CHECK(m.static_test->config.body_mass_kg == 60);
    REQUIRE(m.speed_reference);
    CHECK(m.speed_reference->velocity_mps == doctest::Approx(0.843));
    CHECK_FALSE(m.provenance.empty());
    CHECK_THROWS_AS(load_manifest(fixture("missing.json")), Error);
}

TEST_CASE("comparison figures") {
    const auto& r = fixture_report();
    CHECK(std::abs(r.mass_delta_pct - -22.2) < 0.1);
    REQUIRE(r.pressure.size() == 2);
    const auto& tibia = r.pressure[0];
    const auto& fibula = r.pressure[1];
    CHECK(tibia.region == Region::tibia);
    CHECK(tibia.candidate_peak.value == doctest::Approx(40.00));
    CHECK(tibia.candidate_peak.percent == 55);
    CHECK(tibia.reference_peak.value == doctest::Approx(73.00));
    CHECK(tibia.reference_peak.percent == 64);
    CHECK(std::abs(tibia.peak_reduction_pct - 45.2) <= 0.1);
    CHECK(std::abs(tibia.velocity_normalized_reduction_pct - 21.5) <= 0.1);
    CHECK(tibia.mean_reduction_pct == doctest::Approx(51).epsilon(1e-6));
    CHECK(fibula.candidate_peak.value == doctest::Approx(47.97));
    CHECK(fibula.candidate_peak.percent == 63);
    CHECK(fibula.reference_peak.value == doctest::Approx(69.92));
    CHECK(fibula.reference_peak.percent == 68);
    CHECK(std::abs(fibula.peak_reduction_pct - 31.4) <= 0.1);
    CHECK(std::abs(fibula.velocity_normalized_reduction_pct - 1.7) <= 0.1);
    CHECK(fibula.mean_reduction_pct == doctest::Approx(50).epsilon(1e-6));

    CHECK(r.candidate_gait.correlation_pct.at(Joint::knee) == doctest::Approx(94.43).epsilon(1e-6));
    CHECK(r.reference_gait.correlation_pct.at(Joint::knee) == doctest::Approx(28.85).epsilon(1e-6));
    CHECK(r.symmetry_gain_pp.at(Joint::knee) == doctest::Approx(65.58).epsilon(1e-6));
    CHECK(r.symmetry_gain_pp.at(Joint::ankle) == doctest::Approx(2.38).epsilon(1e-6));

    CHECK(r.static_target_force_n == doctest::Approx(397.305));
    REQUIRE(r.static_regions.size() == 3);
    const std::map<Region, double> reduction{{Region::tibia, 8.5}, {Region::fibula, 15.4}, {Region::calf, 61.0}};
    for (const auto& s : r.static_regions) {
        REQUIRE(s.reduction_vs_literature_pct);
        CHECK(std::abs(*s.reduction_vs_literature_pct - reduction.at(s.region)) <= 0.1);
    }
    REQUIRE(r.speed_change_pct);
    CHECK(*r.speed_change_pct == doctest::Approx(15.065).epsilon(1e-4));
}

TEST_CASE("report text is deterministic and carries units") {
    const auto a = report_to_json(fixture_report());
    const auto b = report_to_json(compare(load_manifest(fixture("comparison.json"))));
    CHECK(a == b);
    const auto doc = nlohmann::json::parse(a);
    CHECK(doc.contains("units"));
    CHECK(doc["units"]["pressure_walking"] == "kPa");
    CHECK(doc["units"]["normalized"] == "MPa/BW");
    CHECK(doc["mass"]["delta_pct"].get<double>() == doctest::Approx(-22.2222).epsilon(1e-4));
    CHECK(doc["walking_pressure"].size() == 2);
    CHECK(doc.contains("provenance"));
    CHECK(doc["speed"].contains("provenance"));
}
