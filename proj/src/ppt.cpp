#include "socketbench/ppt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json_util.hpp"
#include "socketbench/delimited.hpp"
#include "socketbench/error.hpp"
#include "socketbench/signals.hpp"

namespace socketbench::ppt {

using detail::json;

LinearCalibration calibrate(std::span<const CalibrationPair> pairs) {
    if (pairs.size() < 2) throw DomainError("calibrate: needs at least two pairs");
    std::vector<double> raw, force;
    raw.reserve(pairs.size());
    force.reserve(pairs.size());
    for (const auto& p : pairs) {
        raw.push_back(p.raw);
        force.push_back(p.applied_force_n);
    }
    const auto fit = signals::linear_fit(raw, force);
    if (!(fit.slope > 0)) throw DomainError("calibrate: slope must be positive");
    return {fit.slope, fit.intercept, fit.r_squared};
}

std::string_view to_string(SessionState s) {
    switch (s) {
        case SessionState::idle: return "idle";
        case SessionState::resting: return "resting";
        case SessionState::ramping: return "ramping";
        case SessionState::marked: return "marked";
        case SessionState::aborted: return "aborted";
    }
    return "?";
}

PPTSession::PPTSession(Region region, Specimen specimen, LinearCalibration calibration, double max_force_limit_n)
    : region_(region),
      specimen_(std::move(specimen)),
      calibration_(calibration),
      max_force_limit_n_(max_force_limit_n) {
    if (!(max_force_limit_n_ > 0)) throw DomainError("session: force limit must be > 0");
}

double PPTSession::remaining_rest_s() const noexcept {
    return state_ == SessionState::resting ? std::max(0.0, required_rest_s_ - rested_s_) : 0.0;
}

std::optional<double> PPTSession::pain_force_n() const {
    if (!pain_mark_) return std::nullopt;
    return samples_[*pain_mark_].force_n;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void illegal(std::string_view event, SessionState state) {
    throw StateError("illegal transition: " + std::string(event) + " while " + std::string(to_string(state)));
}

}  // namespace

void PPTSession::apply(const SessionEvent& e) {
    std::visit(overloaded{
                   [&](const event::StartRest& ev) {
                       if (state_ != SessionState::idle) illegal("start_rest", state_);
                       if (!(ev.required_s >= 0)) throw DomainError("start_rest: negative rest");
                       required_rest_s_ = ev.required_s;
                       rested_s_ = 0.0;
                       state_ = SessionState::resting;
                   },
                   [&](const event::RestElapsed& ev) {
                       if (state_ != SessionState::resting) illegal("rest_elapsed", state_);
                       if (!(ev.seconds >= 0)) throw DomainError("rest_elapsed: negative duration");
                       rested_s_ += ev.seconds;
                   },
                   [&](const event::StartRamp& ev) {
                       if (state_ != SessionState::resting) illegal("start_ramp", state_);
                       if (rested_s_ < required_rest_s_) {
                           if (!ev.override_rest)
                               throw StateError("start_ramp: rest incomplete (" + format_fixed(rested_s_, 1) +
                                                " of " + format_fixed(required_rest_s_, 1) + " s)");
                           notes_.push_back("rest overridden by operator with " +
                                            format_fixed(required_rest_s_ - rested_s_, 1) + " s remaining");
                       }
                       state_ = SessionState::ramping;
                   },
                   [&](const event::Sample& ev) {
                       if (state_ != SessionState::ramping) illegal("sample", state_);
                       if (!samples_.empty() && !(ev.t_s > samples_.back().t_s))
                           throw DomainError("sample: timestamps must be strictly increasing");
                       const double force = calibration_.force(ev.raw);
                       if (force > max_force_limit_n_) {
                           state_ = SessionState::aborted;
                           abort_reason_ = "force limit exceeded (" + format_fixed(force, 2) + " N > " +
                                           format_fixed(max_force_limit_n_, 2) + " N)";
                           return;
                       }
                       samples_.push_back({ev.t_s, force});
                   },
                   [&](const event::MarkPain&) {
                       if (state_ != SessionState::ramping) illegal("mark_pain", state_);
                       if (samples_.empty()) throw StateError("mark_pain: no samples recorded yet");
                       pain_mark_ = samples_.size() - 1;
                       state_ = SessionState::marked;
                   },
                   [&](const event::Abort& ev) {
                       if (terminal()) illegal("abort", state_);
                       abort_reason_ = ev.reason;
                       state_ = SessionState::aborted;
                   },
               },
               e);
}

PPTSession session_step(PPTSession session, const SessionEvent& e) {
    session.apply(e);
    return session;
}

double ppt_value(const PPTSession& session, double probe_area_mm2) {
    if (!(probe_area_mm2 > 0)) throw DomainError("ppt_value: probe area must be > 0");
    const auto force = session.pain_force_n();
    if (session.state() != SessionState::marked || !force) throw StateError("ppt_value: session is not marked");
    return *force / probe_area_mm2;
}

double device_error(double applied_n, double measured_n) {
    if (!(applied_n > 0)) throw DomainError("device_error: applied force must be > 0");
    return 100.0 * std::abs(applied_n - measured_n) / applied_n;
}

void PPTMatrix::record(const MatrixKey& key, double ppt_mpa) {
    if (!(ppt_mpa > 0)) throw DomainError("ppt matrix: entries must be > 0");
    measurements_[key].push_back(ppt_mpa);
}

void PPTMatrix::set_probe_area(Region region, double area_mm2) {
    if (!(area_mm2 > 0)) throw DomainError("ppt matrix: probe area must be > 0");
    probe_area_[region] = area_mm2;
}

std::optional<double> PPTMatrix::value(const MatrixKey& key) const {
    auto it = measurements_.find(key);
    if (it == measurements_.end()) return std::nullopt;
    const auto& m = it->second;
    return std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(m.size());
}

std::map<MatrixKey, double> PPTMatrix::entries() const {
    std::map<MatrixKey, double> out;
    for (const auto& [key, _] : measurements_) out[key] = *value(key);
    return out;
}

bool PPTMatrix::has_region(Region region) const {
    return std::any_of(measurements_.begin(), measurements_.end(),
                       [&](const auto& kv) { return kv.first.region == region; });
}

PPTMatrix parse_matrix(std::string_view text) {
    using namespace detail;
    const json doc = parse_json(text, "ppt matrix");
    PPTMatrix m;
    try {
        if (doc.contains("probe_area_mm2")) {
            for (const auto& [key, val] : doc.at("probe_area_mm2").items()) {
                if (!val.is_number()) throw ParseError("probe_area_mm2." + key + ": expected a number");
                m.set_probe_area(catalog::parse_region(key), val.get<double>());
            }
        }
        const json& entries = get_array(doc, "entries", "ppt matrix");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const std::string path = "entries[" + std::to_string(i) + "]";
            const json& e = entries[i];
            MatrixKey key{catalog::parse_region(get_string(e, "region", path)), get_string(e, "material", path),
                          get_number(e, "thickness_mm", path)};
            if (e.contains("measurements")) {
                for (const auto& v : get_array(e, "measurements", path)) {
                    if (!v.is_number()) throw ParseError(path + ".measurements: expected numbers");
                    m.record(key, v.get<double>());
                }
            } else {
                m.record(key, get_number(e, "ppt_mpa", path));
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("ppt matrix: ") + e.what());
    }
    return m;
}

PPTMatrix load_matrix(const std::filesystem::path& path) { return parse_matrix(detail::read_text_file(path)); }

std::string serialize_matrix(const PPTMatrix& matrix) {
    json doc;
    doc["units"] = {{"ppt", "MPa"}, {"thickness", "mm"}, {"probe_area", "mm^2"}};
    json areas = json::object();
    for (const auto& [region, area] : matrix.probe_area_mm2()) areas[std::string(catalog::to_string(region))] = area;
    doc["probe_area_mm2"] = areas;
    doc["entries"] = json::array();
    for (const auto& [key, values] : matrix.measurements()) {
        json e = {{"region", catalog::to_string(key.region)},
                  {"material", key.material},
                  {"thickness_mm", key.thickness_mm},
                  {"ppt_mpa", *matrix.value(key)}};
        if (values.size() > 1) e["measurements"] = values;
        doc["entries"].push_back(std::move(e));
    }
    return doc.dump(2) + "\n";
}

SelectionResult select_materials(const PPTMatrix& matrix, const catalog::Catalog& catalog,
                                 std::span<const Region> required, RestOfSocket rest) {
    SelectionResult result;
    result.rest_of_socket = std::move(rest);
    const auto entries = matrix.entries();
    for (const Region region : required) {
        const MatrixKey* best = nullptr;
        double best_ppt = 0.0;
        double best_areal = 0.0;
        for (const auto& [key, ppt] : entries) {
            if (key.region != region) continue;
            const double areal = catalog.material(key.material).density_kg_m3 * key.thickness_mm;
            bool better = false;
            if (!best || ppt > best_ppt) {
                better = true;
            } else if (ppt == best_ppt) {
                if (areal < best_areal)
                    better = true;
                else if (areal == best_areal && key.thickness_mm < best->thickness_mm)
                    better = true;
            }
            if (better) {
                best = &key;
                best_ppt = ppt;
                best_areal = areal;
            }
        }
        if (!best)
            throw ValidationError("matrix", "missing region " + std::string(catalog::to_string(region)));
        result.regions[region] = {best->material, best->thickness_mm, best_ppt};
    }
    return result;
}

std::string serialize_selection(const SelectionResult& selection, const catalog::Catalog& catalog) {
    auto display = [&](const std::string& name) {
        const auto* m = catalog.find_material(name);
        return m ? m->display_name : name;
    };
    json regions = json::object();
    for (const auto& [region, sel] : selection.regions)
        regions[std::string(catalog::to_string(region))] = {{"material", sel.material},
                                                             {"display_name", display(sel.material)},
                                                             {"thickness_mm", sel.thickness_mm},
                                                             {"ppt_mpa", sel.ppt_mpa}};
    json doc = {{"units", {{"ppt", "MPa"}, {"thickness", "mm"}}},
                {"regions", regions},
                {"rest_of_socket",
                 {{"material", selection.rest_of_socket.material},
                  {"display_name", display(selection.rest_of_socket.material)},
                  {"thickness_mm", selection.rest_of_socket.thickness_mm}}}};
    return doc.dump(2) + "\n";
}

std::vector<ScheduledSession> rest_schedule(std::span<const PlannedSession> plan) {
    if (plan.empty()) throw DomainError("rest_schedule: empty plan");
    std::vector<ScheduledSession> out;
    out.reserve(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) out.push_back({plan[i], i == 0 ? first_rest_s : between_rest_s});
    return out;
}

namespace {

ForceStream stream_from(const DelimitedTable& table) {
    ForceStream s;
    const bool has_raw = table.has_column("raw");
    const bool has_force = table.has_column("force_n");
    if (has_raw == has_force)
        throw ParseError(table.source + ": header must declare exactly one of 'raw' or 'force_n'");
    s.raw = has_raw;
    const auto c_t = table.column("t_s");
    const auto c_v = table.column(has_raw ? "raw" : "force_n");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const double t = table.number(i, c_t);
        if (!s.t_s.empty() && !(t > s.t_s.back()))
            throw ParseError(table.source + ":" + std::to_string(table.line_numbers[i]) +
                             ": time stamps must be strictly increasing");
        s.t_s.push_back(t);
        s.value.push_back(table.number(i, c_v));
    }
    if (s.t_s.empty()) throw ParseError(table.source + ": no samples");
    return s;
}

}  // namespace

ForceStream parse_force_stream(std::string_view text, std::string source_name) {
    return stream_from(parse_delimited(text, std::move(source_name)));
}

ForceStream load_force_stream(const std::filesystem::path& path) { return stream_from(load_delimited(path)); }

double SessionPlan::probe_area(Region r) const {
    auto it = probe_area_mm2.find(r);
    return it == probe_area_mm2.end() ? 100.0 : it->second;
}

std::vector<const PlanEntry*> SessionPlan::find_all(Region region, const Specimen& specimen) const {
    std::vector<const PlanEntry*> out;
    for (const auto& e : entries)
        if (e.session.region == region && e.session.specimen.material == specimen.material &&
            std::abs(e.session.specimen.thickness_mm - specimen.thickness_mm) < 1e-9)
            out.push_back(&e);
    return out;
}

const PlanEntry* SessionPlan::find(Region region, const Specimen& specimen) const {
    const auto all = find_all(region, specimen);
    return all.empty() ? nullptr : all.front();
}

SessionPlan load_session_plan(const std::filesystem::path& path) {
    using namespace detail;
    const json doc = parse_json(read_text_file(path), path.string());
    const auto base = path.parent_path();
    SessionPlan plan;
    try {
        if (doc.contains("probe_area_mm2"))
            for (const auto& [key, val] : doc.at("probe_area_mm2").items())
                plan.probe_area_mm2[catalog::parse_region(key)] = val.get<double>();
        if (doc.contains("calibration")) {
            const json& c = doc.at("calibration");
            plan.calibration.slope = get_number(c, "slope", "calibration");
            plan.calibration.intercept = get_number(c, "intercept", "calibration");
        }
        if (doc.contains("max_force_limit_n")) plan.max_force_limit_n = get_number(doc, "max_force_limit_n", "plan");
        const json& sessions = get_array(doc, "sessions", "plan");
        for (std::size_t i = 0; i < sessions.size(); ++i) {
            const std::string p = "sessions[" + std::to_string(i) + "]";
            const json& s = sessions[i];
            PlanEntry e;
            e.session.region = catalog::parse_region(get_string(s, "region", p));
            e.session.specimen = {get_string(s, "material", p), get_number(s, "thickness_mm", p)};
            e.session.screening = s.value("screening", false);
            e.stream_path = get_string(s, "stream", p);
            if (e.stream_path.is_relative()) e.stream_path = base / e.stream_path;
            e.stream = load_force_stream(e.stream_path);
            e.mark_at_s = get_optional_number(s, "mark_at_s", p);
            plan.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (plan.entries.empty()) throw ParseError(path.string() + ": plan has no sessions");
    return plan;
}

ReplayResult replay_plan(const SessionPlan& plan) {
    ReplayResult result;
    std::vector<PlannedSession> planned;
    for (const auto& e : plan.entries) planned.push_back(e.session);
    const auto schedule = rest_schedule(planned);
    for (const auto& region : catalog::all_regions)
        if (region != Region::rest) result.matrix.set_probe_area(region, plan.probe_area(region));

    constexpr double time_eps = 1e-9;
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
        const auto& entry = plan.entries[i];
        PPTSession s(entry.session.region, entry.session.specimen,
                     entry.stream.raw ? plan.calibration : LinearCalibration::identity(), plan.max_force_limit_n);
        s.screening = entry.session.screening;
        s.apply(event::StartRest{schedule[i].required_rest_s});
        s.apply(event::RestElapsed{schedule[i].required_rest_s});
        s.apply(event::StartRamp{});

        bool reached_mark = false;
        for (std::size_t j = 0; j < entry.stream.size() && !s.terminal(); ++j) {
            const double t = entry.stream.t_s[j];
            if (entry.mark_at_s && t > *entry.mark_at_s + time_eps) {
                reached_mark = true;
                break;
            }
            s.apply(event::Sample{t, entry.stream.value[j]});
            if (entry.mark_at_s && std::abs(t - *entry.mark_at_s) <= time_eps) reached_mark = true;
        }
        if (!s.terminal()) {
            if (reached_mark && !s.samples().empty())
                s.apply(event::MarkPain{});
            else
                s.apply(event::Abort{entry.mark_at_s ? "source exhausted before pain mark" : "source exhausted"});
        }

        ReplayOutcome outcome{s, std::nullopt};
        if (s.state() == SessionState::marked) {
            outcome.ppt_mpa = ppt_value(s, plan.probe_area(s.region()));
            if (!s.screening)
                result.matrix.record({s.region(), s.specimen().material, s.specimen().thickness_mm}, *outcome.ppt_mpa);
        }
        result.sessions.push_back(std::move(outcome));
    }
    return result;
}

}  // namespace socketbench::ppt
