#include "pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace hpm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

GridSpec parse_grid(const json& j) {
  if (!j.contains("dims") || j["dims"].size() != 3)
    throw Error(ErrorCode::ParseError, "config: workspace.dims must be [nx,ny,nz]");
  GridSpec g;
  g.nx = j["dims"][0].get<std::int64_t>();
  g.ny = j["dims"][1].get<std::int64_t>();
  g.nz = j["dims"][2].get<std::int64_t>();
  g.spacing = j.value("spacing", 1.0);
  if (j.contains("origin")) {
    for (int i = 0; i < 3; ++i) g.origin[std::size_t(i)] = j["origin"][std::size_t(i)].get<double>();
  } else {
    // default: world origin at the center voxel's center
    GridSpec c = centered_grid(g.nx, g.ny, g.nz, g.spacing);
    g.origin = c.origin;
  }
  g.validate();
  return g;
}

CorrelateMethod parse_method(const std::string& m) {
  if (m == "fft") return CorrelateMethod::Fft;
  if (m == "direct") return CorrelateMethod::Direct;
  throw Error(ErrorCode::ParseError, "config: method must be 'fft' or 'direct'");
}

}  // namespace

JobConfig parse_job_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config JSON: ") + e.what());
  }
  JobConfig cfg;
  if (!j.contains("workspace"))
    throw Error(ErrorCode::ParseError, "config: missing 'workspace'");
  cfg.workspace = parse_grid(j["workspace"]);

  if (!j.contains("target"))
    throw Error(ErrorCode::ParseError, "config: missing 'target'");
  const json& t = j["target"];
  if (t.contains("scene"))
    cfg.target_scene = parse_scene_json(t["scene"].dump());
  else if (t.contains("file"))
    cfg.target_file = t["file"].get<std::string>();
  else
    throw Error(ErrorCode::ParseError, "config: target needs 'scene' or 'file'");

  cfg.tolerance_mm = j.value("tolerance_mm", 0.0);
  cfg.method = parse_method(j.value("method", "fft"));
  if (j.contains("planner")) {
    const json& p = j["planner"];
    cfg.k_best = p.value("k_best", 1);
    cfg.max_depth = p.value("max_depth", 8);
    cfg.enrichment_budget = p.value("enrichment_budget", 0);
    cfg.seed = p.value("seed", std::uint64_t(0));
  }

  if (!j.contains("capabilities") || !j["capabilities"].is_array() ||
      j["capabilities"].empty())
    throw Error(ErrorCode::ParseError, "config: 'capabilities' must be a nonempty list");
  bool has_am = false;
  int idx = 0;
  for (const json& c : j["capabilities"]) {
    CapabilityConfig cc;
    cc.name = c.value("name", "cap" + std::to_string(idx + 1));
    cc.rate = c.value("rate", 1.0);
    if (c.value("raw_stock", false)) {
      cc.raw_stock = true;
      for (int i = 0; i < 3; ++i) {
        cc.box_min[std::size_t(i)] = c["box_min"][std::size_t(i)].get<double>();
        cc.box_max[std::size_t(i)] = c["box_max"][std::size_t(i)].get<double>();
      }
      has_am = true;
    } else if (c.contains("solid")) {
      cc.solid_file = c["solid"].value("file", "");
      if (cc.solid_file.empty())
        throw Error(ErrorCode::ParseError,
                    "config: imported primitive needs solid.file");
      std::string m = c.value("mode", "");
      if (m == "AM")
        cc.import_mode = Mode::AM;
      else if (m == "SM")
        cc.import_mode = Mode::SM;
      else
        throw Error(ErrorCode::ParseError,
                    "config: imported primitive needs mode AM|SM");
      if (*cc.import_mode == Mode::AM) has_am = true;
    } else {
      std::string vname = c.value("variant", "");
      auto v = variant_from_name(vname);
      if (!v)
        throw Error(ErrorCode::ParseError,
                    "config: capability '" + cc.name + "': unknown variant '" +
                        vname + "'");
      cc.variant = *v;
      if (variant_mode(*v) == Mode::AM) has_am = true;
      if (c.contains("mmn")) {
        if (c["mmn"].contains("scene"))
          cc.mmn_scene = parse_scene_json(c["mmn"]["scene"].dump());
        else
          cc.mmn_file = c["mmn"].value("file", "");
      }
      if (!cc.mmn_scene && cc.mmn_file.empty())
        throw Error(ErrorCode::ParseError,
                    "config: capability '" + cc.name + "' needs an mmn");
      if (c.contains("assembly")) {
        if (c["assembly"].contains("scene"))
          cc.assembly_scene = parse_scene_json(c["assembly"]["scene"].dump());
        else
          cc.assembly_file = c["assembly"].value("file", "");
      }
      cc.orientation = c.value("orientation", 0);
      cc.lambda = c.value("lambda", 0.0);
    }
    cfg.capabilities.push_back(std::move(cc));
    ++idx;
  }
  if (!has_am)
    throw Error(ErrorCode::ParseError,
                "config: at least one AM capability is required (C3)");
  return cfg;
}

JobConfig load_job_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_job_config(ss.str());
}

namespace {

std::string prim_path(const std::string& dir, int i) {
  std::ostringstream s;
  s << dir << "/prim_" << std::setw(2) << std::setfill('0') << i << ".hpvx";
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for write: " + path);
  f << text;
}

json timestamp_field(const StageFlags& flags) {
  if (flags.no_timestamp) return nullptr;
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                  now.time_since_epoch())
                  .count();
  return secs;
}

VoxelSolid require_target(const JobConfig& cfg, const std::string& dir) {
  std::string p = dir + "/target.hpvx";
  if (!fs::exists(p))
    throw Error(ErrorCode::NotFound,
                "stage dependency missing: run 'voxelize' first (" + p + ")");
  VoxelSolid s = load_solid(p);
  if (s.grid() != cfg.workspace)
    throw Error(ErrorCode::GridMismatch, "target.hpvx grid differs from config");
  return s;
}

std::vector<Primitive> require_primitives(const JobConfig& cfg,
                                          const std::string& dir) {
  std::string meta = dir + "/primitives.json";
  if (!fs::exists(meta))
    throw Error(ErrorCode::NotFound,
                "stage dependency missing: run 'primitive' first");
  std::ifstream f(meta);
  json j = json::parse(f);
  std::vector<Primitive> prims;
  for (const json& p : j["primitives"]) {
    int id = p["id"].get<int>();
    Primitive prim;
    prim.solid = load_solid(prim_path(dir, id));
    if (prim.solid.grid() != cfg.workspace)
      throw Error(ErrorCode::GridMismatch, "primitive grid differs from config");
    prim.mode = p["mode"] == "AM" ? Mode::AM : Mode::SM;
    prim.rate = p["rate"].get<double>();
    prim.is_raw_stock = p["raw_stock"].get<bool>();
    prim.id = id;
    prims.push_back(std::move(prim));
  }
  return prims;
}

Decomposition classified_decomposition(const JobConfig& cfg,
                                       const std::string& dir,
                                       const StageFlags& flags) {
  VoxelSolid target = require_target(cfg, dir);
  auto prims = require_primitives(cfg, dir);
  Decomposition d(prims, cfg.workspace);
  double tol = flags.tolerance_mm.value_or(cfg.tolerance_mm);
  return d.classify_target(target, tol);
}

json plan_to_json(const Plan& plan, const SymbolicPlanner& planner) {
  json j;
  j["expression"] = plan.expression.to_string();
  j["cost"] = plan.cost;
  double stock_volume = 0;
  if (!plan.steps.empty())
    stock_volume = planner.volume_of(plan.states.front());
  j["cost_per_stock_volume"] =
      stock_volume > 0 ? plan.cost / stock_volume : 0.0;
  json steps = json::array();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    json s;
    s["primitive"] = "P" + std::to_string(plan.steps[i].primitive_id);
    s["mode"] = plan.steps[i].mode == Mode::AM ? "AM" : "SM";
    s["volume_mm3"] = plan.step_volumes[i];
    s["cost"] = plan.step_costs[i];
    steps.push_back(s);
  }
  j["actions"] = steps;
  return j;
}

int stage_voxelize(const JobConfig& cfg, const std::string& dir,
                   const StageFlags&, std::string* log) {
  VoxelSolid target;
  if (cfg.target_scene)
    target = voxelize(cfg.target_scene, cfg.workspace);
  else {
    target = load_solid(cfg.target_file);
    if (target.grid() != cfg.workspace)
      throw Error(ErrorCode::GridMismatch,
                  "imported target grid differs from workspace");
  }
  save_solid(target, dir + "/target.hpvx");
  if (log)
    *log += "voxelize: target " + std::to_string(target.popcount()) +
            " voxels\n";
  return 0;
}

int stage_primitive(const JobConfig& cfg, const std::string& dir,
                    const StageFlags& flags, std::string* log) {
  VoxelSolid target = require_target(cfg, dir);
  CorrelateMethod method = flags.method.value_or(cfg.method);
  json meta;
  meta["generated_at"] = timestamp_field(flags);
  json list = json::array();
  int id = 0;
  for (const CapabilityConfig& cc : cfg.capabilities) {
    ++id;
    Primitive p;
    if (cc.raw_stock) {
      p = make_raw_stock(cc.box_min, cc.box_max, cfg.workspace, cc.rate);
    } else if (!cc.solid_file.empty()) {
      p = primitive_from_solid(*cc.import_mode, load_solid(cc.solid_file),
                               cc.rate);
      if (p.solid.grid() != cfg.workspace)
        throw Error(ErrorCode::GridMismatch,
                    "imported primitive grid differs from workspace");
    } else {
      Capability cap;
      cap.variant = *cc.variant;
      cap.mmn = cc.mmn_scene ? voxelize(cc.mmn_scene, cfg.workspace)
                             : load_solid(cc.mmn_file);
      cap.assembly = cc.assembly_scene
                         ? voxelize(cc.assembly_scene, cfg.workspace)
                         : (cc.assembly_file.empty()
                                ? VoxelSolid(cfg.workspace)
                                : load_solid(cc.assembly_file));
      cap.orientation = cc.orientation;
      cap.lambda = cc.lambda;
      cap.rate = cc.rate;
      p = build_primitive(cap, target, method);
    }
    p.id = id;
    save_solid(p.solid, prim_path(dir, id));
    json pj;
    pj["id"] = id;
    pj["name"] = cc.name;
    pj["mode"] = p.mode == Mode::AM ? "AM" : "SM";
    pj["rate"] = p.rate;
    pj["raw_stock"] = p.is_raw_stock;
    pj["voxels"] = p.solid.popcount();
    list.push_back(pj);
    if (log)
      *log += "primitive: P" + std::to_string(id) + " (" + cc.name + ") " +
              std::to_string(p.solid.popcount()) + " voxels\n";
  }
  meta["primitives"] = list;
  write_text(dir + "/primitives.json", meta.dump(2) + "\n");
  return 0;
}

int stage_decompose(const JobConfig& cfg, const std::string& dir,
                    const StageFlags&, std::string* log) {
  auto prims = require_primitives(cfg, dir);
  Decomposition d(prims, cfg.workspace);
  write_text(dir + "/atoms.csv", d.atoms_csv());
  if (log)
    *log += "decompose: " + std::to_string(d.atoms().size()) +
            " nonempty atoms from " + std::to_string(d.primitive_count()) +
            " primitives\n";
  return 0;
}

int stage_check(const JobConfig& cfg, const std::string& dir,
                const StageFlags& flags, std::string* log) {
  Decomposition d = classified_decomposition(cfg, dir, flags);
  write_text(dir + "/atoms.csv", d.atoms_csv());
  auto test = d.manufacturability_test();
  json j;
  j["generated_at"] = timestamp_field(flags);
  j["candidate"] = test.candidate;
  json v = json::array();
  for (std::uint64_t code : test.violating_codes)
    v.push_back(code_string(code, d.primitive_count()));
  j["violating_atoms"] = v;
  j["nonempty_atoms"] = d.atoms().size();
  j["target_mask_size"] = d.target_mask().size();
  write_text(dir + "/check.json", j.dump(2) + "\n");

  auto split = d.split_report();
  for (const auto& e : split) {
    std::string base =
        dir + "/split_" + code_string(e.code, d.primitive_count());
    save_solid(e.subatom_in, base + "_in.hpvx");
    save_solid(e.subatom_out, base + "_out.hpvx");
  }
  if (log) {
    *log += "check: " + std::string(test.candidate
                                        ? "manufacturable-candidate"
                                        : "NOT manufacturable") + "\n";
    for (std::uint64_t code : test.violating_codes)
      *log += "  violating atom A_" +
              code_string(code, d.primitive_count()) + "\n";
  }
  return test.candidate ? 0 : 2;
}

int stage_plan(const JobConfig& cfg, const std::string& dir,
               const StageFlags& flags, std::string* log) {
  Decomposition d = classified_decomposition(cfg, dir, flags);
  SymbolicPlanner planner(d);
  SearchOptions opt;
  opt.k_best = flags.k_best.value_or(cfg.k_best);
  opt.max_depth = cfg.max_depth;
  SearchResult res = planner.search(opt);

  json j;
  j["generated_at"] = timestamp_field(flags);
  j["k_requested"] = opt.k_best;
  j["plan_count"] = res.plans.size();
  j["search_exhausted"] = res.exhausted;
  j["minimal_dnf"] = planner.minimal_dnf().atoms_string(d.primitive_count());
  json plans = json::array();
  for (const Plan& p : res.plans) plans.push_back(plan_to_json(p, planner));
  j["plans"] = plans;
  if (cfg.enrichment_budget > 0) {
    auto rep = planner.enrich_and_match(cfg.enrichment_budget, cfg.max_depth,
                                        cfg.seed);
    json ej;
    ej["exhaustive"] = rep.exhaustive;
    json entries = json::array();
    for (const auto& e : rep.entries) {
      json x;
      json added = json::array();
      for (auto c : e.added_codes)
        added.push_back(code_string(c, d.primitive_count()));
      x["added_empty_atoms"] = added;
      x["plan_found"] = e.plan_found;
      if (e.plan_found) x["witness"] = e.witness;
      entries.push_back(x);
    }
    ej["entries"] = entries;
    j["enrichment"] = ej;
  }
  write_text(dir + "/plans.json", j.dump(2) + "\n");

  std::ostringstream txt;
  txt << "plans: " << res.plans.size() << " found (k=" << opt.k_best << ")\n";
  int rank = 0;
  for (const Plan& p : res.plans) {
    txt << "#" << ++rank << "  cost=" << std::fixed << std::setprecision(4)
        << p.cost << "  " << p.expression.to_string() << "\n";
    for (std::size_t i = 0; i < p.steps.size(); ++i)
      txt << "    " << (p.steps[i].mode == Mode::AM ? "AM " : "SM ") << "P"
          << p.steps[i].primitive_id << "  volume=" << p.step_volumes[i]
          << "  cost=" << p.step_costs[i] << "\n";
  }
  write_text(dir + "/plans.txt", txt.str());
  if (log) *log += txt.str();
  return res.plans.empty() ? 3 : 0;
}

int stage_verify(const JobConfig& cfg, const std::string& dir,
                 const StageFlags& flags, std::string* log) {
  std::string plans_path = dir + "/plans.json";
  if (!fs::exists(plans_path))
    throw Error(ErrorCode::NotFound, "stage dependency missing: run 'plan' first");
  Decomposition d = classified_decomposition(cfg, dir, flags);
  SymbolicPlanner planner(d);
  std::ifstream f(plans_path);
  json j = json::parse(f);
  bool all_ok = true;
  json results = json::array();
  for (const json& pj : j["plans"]) {
    Expression e = parse_expression(pj["expression"].get<std::string>());
    Plan plan;
    plan.steps = e.steps;
    plan.expression = e;
    bool ok = verify_plan_geometric(plan, d);
    all_ok = all_ok && ok;
    json r;
    r["expression"] = pj["expression"];
    r["geometric_match"] = ok;
    results.push_back(r);
    if (log)
      *log += std::string("verify: ") + (ok ? "ok  " : "MISMATCH  ") +
              pj["expression"].get<std::string>() + "\n";
  }
  json out;
  out["generated_at"] = timestamp_field(flags);
  out["all_match"] = all_ok;
  out["results"] = results;
  write_text(dir + "/verify.json", out.dump(2) + "\n");
  return all_ok ? 0 : 4;
}

int stage_report(const JobConfig& cfg, const std::string& dir,
                 const StageFlags& flags, std::string* log) {
  std::ostringstream out;
  out << "hybrid process planning report\n";
  out << "==============================\n";
  for (const char* name : {"check.json", "plans.txt", "verify.json"}) {
    std::string p = dir + "/" + name;
    if (!fs::exists(p)) continue;
    std::ifstream f(p);
    out << "\n--- " << name << " ---\n" << f.rdbuf();
  }
  (void)cfg;
  (void)flags;
  write_text(dir + "/report.txt", out.str());
  if (log) *log += out.str();
  return 0;
}

}  // namespace

int run_stage(const std::string& stage, const JobConfig& config,
              const std::string& job_dir, const StageFlags& flags,
              std::string* log) {
  fs::create_directories(job_dir);
  if (stage == "voxelize") return stage_voxelize(config, job_dir, flags, log);
  if (stage == "primitive") return stage_primitive(config, job_dir, flags, log);
  if (stage == "decompose") return stage_decompose(config, job_dir, flags, log);
  if (stage == "check") return stage_check(config, job_dir, flags, log);
  if (stage == "plan") return stage_plan(config, job_dir, flags, log);
  if (stage == "verify") return stage_verify(config, job_dir, flags, log);
  if (stage == "report") return stage_report(config, job_dir, flags, log);
  throw Error(ErrorCode::InvalidArgument, "unknown stage: " + stage);
}

}  // namespace hpm
