// formkie: classify scanned forms and extract key-value pairs from OCR output.
//
// Exit codes: 0 success, 2 usage or schema error, 1 internal failure.

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formkie/classification.hpp"
#include "formkie/errors.hpp"
#include "formkie/metrics.hpp"
#include "formkie/pipeline.hpp"
#include "formkie/serialization.hpp"
#include "formkie/synth.hpp"

namespace fs = std::filesystem;
using namespace formkie;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

// Input problems the user can fix: bad files, bad schema, bad values.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  bool diagnostics = false;
  bool no_align = false;
  bool no_scale = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Pipeline config file (JSON); see `formkie config --dump`");
  cmd->add_flag("--diagnostics", f.diagnostics, "Include alignment and scaling reports");
  cmd->add_flag("--no-align", f.no_align, "Skip document alignment");
  cmd->add_flag("--no-scale", f.no_scale, "Skip segment scaling");
  cmd->add_option("--seed", f.seed, "Random seed (RANSAC; generator for `gen`)");
  cmd->add_option("--jobs", f.jobs, "Documents processed concurrently")->check(CLI::PositiveNumber);
}

std::string load(const std::string& path) {
  try {
    return io::read_file(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

PipelineConfig resolve_config(const CommonFlags& f) {
  PipelineConfig cfg;
  if (!f.config_path.empty()) cfg = io::parse_config(load(f.config_path), cfg);
  if (f.diagnostics) cfg.run.diagnostics = true;
  if (f.no_align) cfg.stages.align = false;
  if (f.no_scale) cfg.stages.scale = false;
  if (f.seed) cfg.ransac.seed = *f.seed;
  if (f.jobs) cfg.run.jobs = *f.jobs;
  cfg.classify.consolidation = cfg.consolidation;
  return cfg;
}

OcrDocument load_document(const std::string& path) {
  auto parsed = parse_ocr_json(load(path));
  for (const auto w : parsed.warnings) {
    if (w == OcrWarning::EmptyDocument) std::cerr << "warning: " << path << ": document has no tokens\n";
  }
  return std::move(parsed.document);
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep input order.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t jobs, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::optional<R>> out(n);
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  auto work = [&](std::size_t begin) {
    for (std::size_t i = begin; i < n; i += jobs) out[i] = fn(i);
  };
  if (jobs <= 1) {
    work(0);
  } else {
    std::vector<std::future<void>> running;
    for (std::size_t j = 0; j < jobs; ++j) running.push_back(std::async(std::launch::async, work, j));
    for (auto& r : running) r.get();
  }
  return out;
}

// Per-document outcome: the JSON line, or the error message and its exit code.
struct Outcome {
  std::string line;
  std::string error;
  int code = kExitOk;
};

template <class Fn>
Outcome guarded(const std::string& path, Fn fn) {
  try {
    return {fn(), {}, kExitOk};
  } catch (const UsageError& e) {
    return {{}, path + ": " + e.what(), kExitUsage};
  } catch (const SchemaError& e) {
    return {{}, path + ": " + e.what(), kExitUsage};
  } catch (const GeometryError& e) {
    return {{}, path + ": " + e.what(), kExitUsage};
  } catch (const DimensionMismatch& e) {
    return {{}, path + ": " + e.what(), kExitUsage};
  } catch (const std::exception& e) {
    return {{}, path + ": internal error: " + e.what(), kExitInternal};
  }
}

int emit(const std::vector<std::optional<Outcome>>& outcomes) {
  int code = kExitOk;
  for (const auto& o : outcomes) {
    if (o->code == kExitOk) {
      std::cout << o->line << '\n';
    } else {
      std::cerr << "error: " << o->error << '\n';
      code = std::max(code, o->code);
    }
  }
  std::cout.flush();
  return code;
}

int cmd_classify(const std::string& bank_path, const std::vector<std::string>& inputs, const CommonFlags& flags) {
  const PipelineConfig cfg = resolve_config(flags);
  const Classifier classifier(io::parse_bank(load(bank_path)), cfg.classify);
  const auto outcomes = parallel_map(inputs.size(), cfg.run.jobs, [&](std::size_t i) {
    return guarded(inputs[i], [&] {
      const OcrDocument doc = load_document(inputs[i]);
      const auto c = classifier.classify(doc);
      return io::classification_report(doc.source_id, c, classifier.bank().labels()).dump();
    });
  });
  return emit(outcomes);
}

int cmd_extract(const std::string& template_path, const std::vector<std::string>& inputs, const CommonFlags& flags) {
  const PipelineConfig cfg = resolve_config(flags);
  const KieTemplate tmpl = io::parse_kie_template(load(template_path));
  const auto outcomes = parallel_map(inputs.size(), cfg.run.jobs, [&](std::size_t i) {
    return guarded(inputs[i], [&] {
      const OcrDocument doc = load_document(inputs[i]);
      return io::extraction_report(run_extraction(tmpl, doc, cfg), cfg.run.diagnostics).dump();
    });
  });
  return emit(outcomes);
}

int cmd_eval(const std::string& manifest_path, const std::string& ablate, bool ablate_given,
             const std::string& json_out, const CommonFlags& flags) {
  const PipelineConfig cfg = resolve_config(flags);
  std::vector<Variant> variants;
  if (ablate_given) {
    std::string names = ablate.empty() ? "full,no_align,no_scale" : ablate;
    std::size_t pos = 0;
    while (pos <= names.size()) {
      auto end = names.find(',', pos);
      if (end == std::string::npos) end = names.size();
      const std::string name = names.substr(pos, end - pos);
      if (!name.empty()) {
        try {
          variants.push_back(parse_variant(name));
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
      pos = end + 1;
    }
  } else {
    variants.push_back(Variant::Full);
  }

  const fs::path base = fs::path(manifest_path).parent_path();
  const auto records = io::parse_manifest(load(manifest_path));
  std::map<std::string, KieTemplate> templates;
  std::vector<OcrDocument> docs;
  std::vector<synth::GroundTruth> truths;
  docs.reserve(records.size());
  truths.reserve(records.size());
  std::vector<const KieTemplate*> tmpl_of;
  for (const auto& r : records) {
    const std::string tpath = (base / r.template_path).string();
    if (!templates.count(tpath)) templates.emplace(tpath, io::parse_kie_template(load(tpath)));
    tmpl_of.push_back(&templates.at(tpath));
    docs.push_back(load_document((base / r.form).string()));
    truths.push_back(io::parse_ground_truth(load((base / r.truth).string())));
  }
  std::vector<EvalItem> items;
  for (std::size_t i = 0; i < records.size(); ++i) items.push_back({tmpl_of[i], &docs[i], &truths[i]});

  const auto rows = run_ablation(items, cfg, variants, cfg.run.jobs);
  io::ojson out = io::ojson::object();
  for (const auto& row : rows) {
    std::cout << format_table(row.table, std::string("variant: ") + std::string(to_string(row.variant))) << '\n';
    out[std::string(to_string(row.variant))] = io::to_json(row.table);
  }
  if (!json_out.empty()) io::write_file(json_out, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_gen(const std::string& spec_path, std::size_t count, const std::string& out_dir, const CommonFlags& flags,
            bool dump_spec) {
  if (dump_spec) {
    std::cout << io::to_json(synth::default_dataset_spec()).dump(2) << '\n';
    return kExitOk;
  }
  if (spec_path.empty()) throw UsageError("gen needs a dataset spec file (see --dump-spec)");
  if (out_dir.empty()) throw UsageError("gen needs --out DIR");
  const PipelineConfig cfg = resolve_config(flags);
  const synth::DatasetSpec spec = io::parse_dataset_spec(load(spec_path));
  const std::uint64_t seed = flags.seed.value_or(0);
  const synth::Dataset data = synth::generate_dataset(spec, count, seed);

  const fs::path root(out_dir);
  fs::create_directories(root / "templates");
  fs::create_directories(root / "forms");
  fs::create_directories(root / "truth");

  std::vector<BankClass> bank;
  std::map<std::string, std::string> template_file;
  for (const auto& t : data.templates) {
    const std::string label = t.kie.class_label;
    template_file[label] = "templates/" + label + ".kie.json";
    io::write_file((root / template_file[label]).string(), io::to_json(t.kie).dump(2) + "\n");
    io::write_file((root / "templates" / (label + ".ocr.json")).string(), to_ocr_json(t.blank) + "\n");
    const auto entities = consolidate(t.blank, cfg.consolidation);
    bank.push_back({label, document_text(entities), {},
                    layout_vector(entities, t.blank.page_width, t.blank.page_height, cfg.classify.grid)});
  }
  io::write_file((root / "bank.json").string(), io::bank_to_json(bank).dump(2) + "\n");

  std::string manifest;
  for (const auto& f : data.forms) {
    const std::string form_rel = "forms/" + f.document.source_id + ".json";
    const std::string truth_rel = "truth/" + f.document.source_id + ".json";
    io::write_file((root / form_rel).string(), to_ocr_json(f.document) + "\n");
    io::write_file((root / truth_rel).string(), io::to_json(f.truth).dump(2) + "\n");
    manifest += io::manifest_line({form_rel, f.truth.class_label, template_file.at(f.truth.class_label), truth_rel});
    manifest += '\n';
  }
  io::write_file((root / "manifest.jsonl").string(), manifest);
  std::cerr << "wrote " << data.forms.size() << " forms for " << data.templates.size() << " templates to "
            << root.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Template-based form classification and key-value extraction"};
  app.require_subcommand(1);

  CommonFlags classify_flags, extract_flags, eval_flags, gen_flags, config_flags;

  std::string bank_path;
  std::vector<std::string> classify_inputs;
  auto* classify = app.add_subcommand("classify", "Classify OCR documents against a template bank");
  classify->add_option("bank", bank_path, "Template bank JSON")->required();
  classify->add_option("ocr", classify_inputs, "OCR JSON files")->required();
  add_common(classify, classify_flags);

  std::string template_path;
  std::vector<std::string> extract_inputs;
  auto* extract = app.add_subcommand("extract", "Extract key-value pairs using a KIE template");
  extract->add_option("template", template_path, "KIE template JSON")->required();
  extract->add_option("ocr", extract_inputs, "OCR JSON files")->required();
  add_common(extract, extract_flags);

  std::string manifest_path, ablate, json_out;
  auto* eval = app.add_subcommand("eval", "Score extraction on a generated dataset");
  eval->add_option("manifest", manifest_path, "Dataset manifest (JSON lines)")->required();
  auto* ablate_opt = eval->add_option("--ablate", ablate,
                                      "Comma-separated variants: full, no_align, no_scale (default: all three)")
                         ->expected(0, 1);
  eval->add_option("--json", json_out, "Also write metrics JSON to this path");
  add_common(eval, eval_flags);

  std::string spec_path, out_dir;
  std::size_t count = 0;
  bool dump_spec = false;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("spec", spec_path, "Dataset spec JSON");
  gen->add_option("--count", count, "Number of forms");
  gen->add_option("--out", out_dir, "Output directory");
  gen->add_flag("--dump-spec", dump_spec, "Print the built-in dataset spec and exit");
  add_common(gen, gen_flags);

  bool dump = false;
  auto* config = app.add_subcommand("config", "Show the effective pipeline configuration");
  config->add_flag("--dump", dump, "Print the configuration as JSON");
  add_common(config, config_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (classify->parsed()) return cmd_classify(bank_path, classify_inputs, classify_flags);
    if (extract->parsed()) return cmd_extract(template_path, extract_inputs, extract_flags);
    if (eval->parsed()) return cmd_eval(manifest_path, ablate, ablate_opt->count() > 0, json_out, eval_flags);
    if (gen->parsed()) return cmd_gen(spec_path, count, out_dir, gen_flags, dump_spec);
    if (config->parsed()) {
      std::cout << io::to_json(resolve_config(config_flags)).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TemplateMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptyCorpus& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
