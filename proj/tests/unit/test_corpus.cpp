#include <doctest.h>

#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <semfield/corpus.hpp>
#include <semfield/error.hpp>

#include "test_support.hpp"

using namespace semfield;
using testing::fixture;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::analysis;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("tokenize matches hand-split fixtures") {
    const auto en = english_profile();
    const auto ru = russian_profile();
    CHECK(tokenize(slurp(fixture("tokenize/hyphen.txt")), en) == lines_of(fixture("tokenize/hyphen.expected")));
    CHECK(tokenize(slurp(fixture("tokenize/mixed_en.txt")), en) == lines_of(fixture("tokenize/mixed_en.expected")));
    CHECK(tokenize(slurp(fixture("tokenize/mixed_ru.txt")), ru) == lines_of(fixture("tokenize/mixed_ru.expected")));
  }

  TEST_CASE("digits and punctuation never form tokens") {
    CHECK(tokenize("1999 -- 2.5% ... !!!", english_profile()).empty());
    CHECK(tokenize("", english_profile()).empty());
  }

  TEST_CASE("case folding keeps sentence-initial words together") {
    const auto toks = tokenize("Good good GOOD", english_profile());
    CHECK(toks == std::vector<std::string>{"good", "good", "good"});
    CHECK(tokenize("Кризис КРИЗИС", russian_profile()) == std::vector<std::string>{"кризис", "кризис"});
  }

  TEST_CASE("invalid UTF-8 bytes separate tokens") {
    const std::string text = std::string("ab") + '\xff' + "cd" + '\xc0' + '\xaf' + "ef";
    CHECK(tokenize(text, english_profile()) == std::vector<std::string>{"ab", "cd", "ef"});
  }

  TEST_CASE("english profile does not count Cyrillic letters") {
    CHECK(tokenize("summit саммит", english_profile()) == std::vector<std::string>{"summit"});
    CHECK(tokenize("summit саммит", russian_profile()) == std::vector<std::string>{"summit", "саммит"});
  }

  TEST_CASE("language profile validation") {
    LangProfile p{"xx", {}, true};
    CHECK_THROWS_AS(p.validate(), Error);
    p.letter_classes = {{U'z', U'a'}};
    CHECK_THROWS_AS(p.validate(), Error);
    p.letter_classes = {{U'a', U'z'}};
    CHECK_NOTHROW(p.validate());
    CHECK(builtin_profile("en"));
    CHECK(builtin_profile("ru"));
    CHECK_FALSE(builtin_profile("de"));
  }

  TEST_CASE("lemmatize is the identity with an empty dictionary") {
    const std::vector<std::string> toks{"said", "told", "crises"};
    CHECK(lemmatize(toks, LemmaDict("en")) == toks);
  }

  TEST_CASE("lemmatize looks up surface forms") {
    const auto dict = LemmaDict::load(fixture("en_lemmas.tsv"), "en");
    const std::vector<std::string> toks{"said", "told", "crises", "summit"};
    CHECK(lemmatize(toks, dict) == std::vector<Lemma>{"say", "tell", "crisis", "summit"});
    const auto ru = LemmaDict::load(fixture("ru_lemmas.tsv"), "ru");
    const std::vector<std::string> ru_toks{"сказал", "кризиса"};
    CHECK(lemmatize(ru_toks, ru) == std::vector<Lemma>{"сказать", "кризис"});
  }

  TEST_CASE("lemma dictionary rejects malformed lines") {
    const auto dir = testing::temp_dir("lemmadict");
    write_text(dir / "bad.tsv", "said\tsay\nbroken line\n");
    CHECK(kind_of([&] { LemmaDict::load(dir / "bad.tsv", "en"); }) == ErrorKind::validation);
  }

  TEST_CASE("load_corpus groups the bilingual fixture into six strata") {
    std::map<std::string, LemmaDict> dicts;
    dicts.emplace("en", LemmaDict::load(fixture("en_lemmas.tsv"), "en"));
    dicts.emplace("ru", LemmaDict::load(fixture("ru_lemmas.tsv"), "ru"));
    const auto strata = load_corpus(fixture("mini/manifest.json"), dicts);
    REQUIRE(strata.size() == 6);
    CHECK(strata[0].label() == "ru/source/summit=G8,term=1");
    CHECK(strata[5].label() == "en/machine/summit=G20,term=2");
    for (const auto& s : strata) CHECK(s.documents.size() == 2);
    CHECK(strata[0].total_word_count() == 42);
    CHECK(strata[0].documents[0].lemmas[1] == "сказать");
  }

  TEST_CASE("load_corpus is deterministic") {
    const auto a = load_corpus(fixture("mini/manifest.json"));
    const auto b = load_corpus(fixture("mini/manifest.json"));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a[i].documents.size() == b[i].documents.size());
      for (std::size_t j = 0; j < a[i].documents.size(); ++j) CHECK(a[i].documents[j].lemmas == b[i].documents[j].lemmas);
    }
  }

  TEST_CASE("manifest errors") {
    const auto dir = testing::temp_dir("manifest");
    write_text(dir / "a.txt", "hello world");

    write_text(dir / "missing.json", R"([{"path":"nope.txt","id":"x","language":"en","translation_kind":"source"}])");
    try {
      load_corpus(dir / "missing.json");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ingest);
      CHECK(std::string(e.what()).find("file not found") != std::string::npos);
      CHECK(std::string(e.what()).find("nope.txt") != std::string::npos);
    }

    write_text(dir / "lang.json", R"([{"path":"a.txt","id":"x","language":"de","translation_kind":"source"}])");
    CHECK(kind_of([&] { load_corpus(dir / "lang.json"); }) == ErrorKind::validation);

    write_text(dir / "dup.json", R"([{"path":"a.txt","id":"x","language":"en","translation_kind":"source"},
                                     {"path":"a.txt","id":"x","language":"en","translation_kind":"human"}])");
    CHECK(kind_of([&] { load_corpus(dir / "dup.json"); }) == ErrorKind::validation);

    write_text(dir / "reserved.json",
               R"([{"path":"a.txt","id":"x","language":"en","translation_kind":"source","group_keys":{"language":"en"}}])");
    CHECK(kind_of([&] { read_manifest(dir / "reserved.json"); }) == ErrorKind::validation);

    write_text(dir / "kind.json", R"([{"path":"a.txt","id":"x","language":"en","translation_kind":"pivot"}])");
    CHECK(kind_of([&] { read_manifest(dir / "kind.json"); }) == ErrorKind::validation);

    write_text(dir / "broken.json", "{not json");
    CHECK(kind_of([&] { read_manifest(dir / "broken.json"); }) == ErrorKind::validation);
  }

  TEST_CASE("manifest round trip") {
    const auto dir = testing::temp_dir("manifest-rt");
    Manifest m;
    m.entries.push_back(ManifestEntry{dir / "docs" / "a.txt", "a", "en", TranslationKind::human, {{"term", "1"}}});
    m.lemma_dicts["en"] = dir / "en.tsv";
    write_manifest(m, dir / "manifest.json");
    const auto back = read_manifest(dir / "manifest.json");
    REQUIRE(back.entries.size() == 1);
    CHECK(back.entries[0].path == m.entries[0].path);
    CHECK(back.entries[0].kind == TranslationKind::human);
    CHECK(back.entries[0].group_keys == m.entries[0].group_keys);
    CHECK(back.lemma_dicts.at("en") == dir / "en.tsv");
  }

  TEST_CASE("stratify conserves word counts for every key") {
    const auto strata = load_corpus(fixture("mini/manifest.json"));
    std::size_t total = 0;
    for (const auto& s : strata) total += s.total_word_count();
    for (const std::string key : {"term", "summit", "translation_kind"}) {
      std::vector<CorpusStratum> en;
      for (const auto& s : strata)
        if (s.language_code == "en") en.push_back(s);
      std::size_t en_total = 0;
      for (const auto& s : en) en_total += s.total_word_count();
      std::size_t merged_total = 0;
      for (const auto& [value, s] : stratify(en, key)) merged_total += s.total_word_count();
      CHECK(merged_total == en_total);
    }
    std::size_t by_lang = 0;
    for (const auto& [value, s] : stratify(strata, "language")) by_lang += s.total_word_count();
    CHECK(by_lang == total);
  }

  TEST_CASE("stratify merges kinds and keeps only agreeing keys") {
    const auto strata = load_corpus(fixture("mini/manifest.json"));
    std::vector<CorpusStratum> en(strata.begin() + 2, strata.end());
    const auto by_term = stratify(en, "term");
    REQUIRE(by_term.size() == 2);
    const auto& t1 = by_term.at("1");
    CHECK_FALSE(t1.kind.has_value());
    CHECK(t1.group_keys == std::map<std::string, std::string>{{"summit", "G8"}, {"term", "1"}});
    CHECK(t1.label() == "en/mixed/summit=G8,term=1");
    CHECK(kind_of([&] { stratify(strata, "term"); }) == ErrorKind::validation);
    CHECK(kind_of([&] { stratify(en, "author"); }) == ErrorKind::validation);
  }

  TEST_CASE("stratum_key") {
    auto s = testing::stratum("en", {"a"}, TranslationKind::machine);
    s.group_keys["term"] = "2";
    CHECK(stratum_key(s, "language") == "en");
    CHECK(stratum_key(s, "translation_kind") == "machine");
    CHECK(stratum_key(s, "term") == "2");
    CHECK_FALSE(stratum_key(s, "summit"));
  }

  TEST_CASE("translation kind names") {
    for (auto k : {TranslationKind::source, TranslationKind::human, TranslationKind::machine})
      CHECK(parse_translation_kind(to_string(k)) == k);
    CHECK_FALSE(parse_translation_kind("pivot"));
  }
}
