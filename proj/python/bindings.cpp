#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "nerpipe/cli.hpp"
#include "nerpipe/corpus.hpp"
#include "nerpipe/error.hpp"
#include "nerpipe/eval.hpp"
#include "nerpipe/llm.hpp"
#include "nerpipe/mask.hpp"
#include "nerpipe/paraphrase.hpp"
#include "nerpipe/prompt.hpp"
#include "nerpipe/tagfmt.hpp"
#include "nerpipe/validate.hpp"

namespace py = pybind11;
using namespace nerpipe;

namespace {

eval::OutputFormat output_format(const std::string& name) {
  if (name == "flat") return eval::OutputFormat::Flat;
  if (name == "bio") return eval::OutputFormat::Bio;
  throw py::value_error("format must be 'flat' or 'bio'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "NER data pipeline core";

  auto base = py::register_exception<Error>(m, "NerpipeError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<TagFormatError>(m, "TagFormatError", base.ptr());
  py::register_exception<MaskError>(m, "MaskError", base.ptr());
  auto reinject = py::register_exception<ReinjectError>(m, "ReinjectError", base.ptr());
  py::register_exception<MismatchError>(m, "MismatchError", reinject.ptr());
  py::register_exception<UnknownLabelError>(m, "UnknownLabelError", reinject.ptr());
  py::register_exception<ResponseParseError>(m, "ResponseParseError", base.ptr());
  py::register_exception<CountError>(m, "CountError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<BudgetError>(m, "BudgetError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<EvalError>(m, "EvalError", base.ptr());

  py::class_<EntitySpan>(m, "EntitySpan")
      .def(py::init<std::size_t, std::size_t, std::string>(), py::arg("start"), py::arg("end"),
           py::arg("label"))
      .def_readwrite("start", &EntitySpan::start)
      .def_readwrite("end", &EntitySpan::end)
      .def_readwrite("label", &EntitySpan::label)
      .def("__eq__", [](const EntitySpan& a, const EntitySpan& b) { return a == b; })
      .def("__repr__", [](const EntitySpan& s) {
        return "EntitySpan(" + std::to_string(s.start) + ", " + std::to_string(s.end) + ", '" +
               s.label + "')";
      });

  py::class_<AnnotatedSentence>(m, "AnnotatedSentence")
      .def(py::init([](std::string id, std::vector<std::string> tokens,
                       std::vector<EntitySpan> spans, std::string source) {
             AnnotatedSentence s{std::move(id), std::move(tokens), std::move(spans), std::move(source)};
             check_sentence(s);
             return s;
           }),
           py::arg("id"), py::arg("tokens"), py::arg("spans") = std::vector<EntitySpan>{},
           py::arg("source") = "")
      .def_readwrite("id", &AnnotatedSentence::id)
      .def_readwrite("tokens", &AnnotatedSentence::tokens)
      .def_readwrite("spans", &AnnotatedSentence::spans)
      .def_readwrite("source", &AnnotatedSentence::source)
      .def("__eq__", [](const AnnotatedSentence& a, const AnnotatedSentence& b) { return a == b; })
      .def("__repr__", [](const AnnotatedSentence& s) { return corpus::to_jsonl_line(s); });

  m.def("parse_jsonl", &corpus::parse_jsonl, py::arg("text"));
  m.def("emit_jsonl", [](const std::vector<AnnotatedSentence>& s) { return corpus::emit_jsonl(s); });
  m.def("parse_conll", [](std::string_view text, std::string source) {
    corpus::ConllOptions opts;
    opts.source = std::move(source);
    opts.columns = 0;
    return corpus::parse_conll(text, opts);
  }, py::arg("text"), py::arg("source") = "conll");
  m.def("read_corpus", &corpus::read_corpus, py::arg("path"));
  m.def("filter_corpus",
        [](const std::vector<AnnotatedSentence>& sentences, std::size_t min_words, bool english_only,
           std::optional<std::set<std::string>> allowlist, bool drop_without_entities) {
          corpus::FilterOptions opts;
          opts.min_words = min_words;
          opts.english_only = english_only;
          opts.label_allowlist = std::move(allowlist);
          opts.drop_without_entities = drop_without_entities;
          auto r = corpus::filter_corpus(sentences, opts);
          std::vector<std::pair<std::string, std::string>> rejected;
          for (const auto& x : r.rejected)
            rejected.emplace_back(x.sentence.id, std::string(corpus::to_string(x.reason)));
          return py::make_tuple(r.kept, rejected);
        },
        py::arg("sentences"), py::arg("min_words") = 10, py::arg("english_only") = true,
        py::arg("allowlist") = py::none(), py::arg("drop_without_entities") = false);
  m.def("sample_corpus",
        [](const std::vector<AnnotatedSentence>& s, std::size_t n, std::uint64_t seed) {
          return corpus::sample_corpus(s, n, seed);
        },
        py::arg("sentences"), py::arg("n"), py::arg("seed"));

  m.def("spans_to_bio", [](const AnnotatedSentence& s) { return tagfmt::spans_to_bio(s).tags; });
  m.def("bio_to_spans", [](const std::vector<std::string>& tokens, std::vector<std::string> tags) {
    return tagfmt::bio_to_spans(tokens, {std::move(tags), tagfmt::TagScheme::Bio});
  });
  m.def("spans_to_slash", &tagfmt::spans_to_slash);
  m.def("slash_to_tags", [](std::string_view text) {
    auto p = tagfmt::slash_to_tags(text);
    std::vector<std::pair<std::string, std::string>> items;
    for (auto& i : p.items) items.emplace_back(std::move(i.word), std::move(i.tag));
    return py::make_tuple(items, p.irregular);
  });

  py::class_<mask::MaskedTemplate>(m, "MaskedTemplate")
      .def_readonly("parent_id", &mask::MaskedTemplate::parent_id)
      .def("render", &mask::render_template)
      .def("to_json", &mask::template_to_json)
      .def("__repr__", &mask::render_template);
  m.def("mask_entities", &mask::mask_entities, py::arg("sentence"));
  m.def("reinject_entities", &mask::reinject_entities, py::arg("variant"), py::arg("template"),
        py::arg("variant_number") = 1);
  m.def("similarity", [](std::string_view a, std::string_view b) {
    return validate::semantic_similarity(a, b, validate::TermFrequencyEmbedder{});
  });
  m.def("build_paraphrase_prompt", &paraphrase::build_paraphrase_prompt, py::arg("template"),
        py::arg("n_variants") = 2);
  m.def("parse_variants", &paraphrase::parse_variants, py::arg("text"), py::arg("expected"));
  m.def("augment_with_fixture",
        [](const std::vector<AnnotatedSentence>& sentences, std::string_view fixture,
           std::size_t n_variants, std::size_t max_parallel) {
          auto client = llm::MockLlmClient::from_jsonl(fixture);
          paraphrase::ParaphraseConfig cfg;
          cfg.n_variants = n_variants;
          cfg.max_parallel_requests = max_parallel;
          cfg.check();
          validate::TermFrequencyEmbedder tf;
          auto out = paraphrase::augment_corpus(sentences, cfg, client, tf);
          std::vector<AnnotatedSentence> variants;
          for (auto& r : out.records)
            for (auto& v : r.variants) variants.push_back(std::move(v));
          return py::make_tuple(variants, paraphrase::summary_to_json(out.summary));
        },
        py::arg("sentences"), py::arg("fixture"), py::arg("n_variants") = 2,
        py::arg("max_parallel") = 4);

  py::class_<LabelSchema>(m, "LabelSchema")
      .def_property_readonly("name", &LabelSchema::name)
      .def_property_readonly("labels", &LabelSchema::labels)
      .def("__len__", &LabelSchema::size);
  m.def("load_schema", &corpus::load_schema, py::arg("path"));
  m.def("parse_schema", &corpus::parse_schema, py::arg("text"), py::arg("name") = "schema");
  m.def("build_instruction", &prompt::build_instruction, py::arg("schema"),
        py::arg("include_guidelines") = true);
  m.def("count_tokens", [](std::string_view t) { return prompt::count_tokens(t); });
  m.def("build_examples",
        [](const AnnotatedSentence& s, const LabelSchema& schema, bool include_guidelines,
           std::size_t max_tokens) {
          prompt::TokenBudget budget;
          budget.max_tokens = max_tokens;
          return prompt::training_jsonl(prompt::build_example(s, schema, include_guidelines, budget));
        },
        py::arg("sentence"), py::arg("schema"), py::arg("include_guidelines") = true,
        py::arg("max_tokens") = 2048);

  m.def("render_generations",
        [](const std::vector<AnnotatedSentence>& gold, const std::string& format) {
          return eval::render_generations(gold, output_format(format));
        },
        py::arg("gold"), py::arg("format") = "flat");
  m.def("evaluate",
        [](const std::vector<AnnotatedSentence>& gold, const std::map<std::string, std::string>& gens,
           const std::string& format) {
          return eval::render_report(eval::evaluate_generations(gold, gens, output_format(format)),
                                     eval::ReportFormat::Json);
        },
        py::arg("gold"), py::arg("generations"), py::arg("format") = "flat");

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "nerpipe");
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
