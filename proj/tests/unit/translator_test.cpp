// Copyright 2026 The rsvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>

#include "rsvqa/errors.hpp"
#include "rsvqa/translator.hpp"
#include "test_support.hpp"

namespace rsvqa {
namespace {

using testing::StubReply;
using testing::StubServer;
using testing::TempDir;

std::string round_trip(const std::string& text, const std::string& pivot) {
  return mock_translate(mock_translate(text, "en", pivot), pivot, "en");
}

TEST(MockTranslator, ZhGolden) {
  EXPECT_EQ(round_trip("how many buildings are there?", "zh"),
            "what is the number of buildings present?");
}

TEST(MockTranslator, DeGolden) {
  EXPECT_EQ(round_trip("is there a road?", "de"), "does the image contain a road?");
}

TEST(MockTranslator, FrGolden) {
  EXPECT_EQ(round_trip("are there more roads than lakes?", "fr"),
            "is the number of roads greater than the number of lakes?");
}

TEST(MockTranslator, NoRuleIsIdentity) {
  for (const char* pivot : {"zh", "de", "fr"}) {
    EXPECT_EQ(round_trip("what colour is the lake?", pivot), "what colour is the lake?");
  }
}

TEST(MockTranslator, ForwardLegTagsText) {
  const std::string tagged = mock_translate("is there a road?", "en", "de");
  EXPECT_NE(tagged, "is there a road?");
  EXPECT_NE(tagged.find("de"), std::string::npos);
  EXPECT_NE(tagged.find("is there a road?"), std::string::npos);
}

TEST(MockTranslator, IsPure) {
  const std::string a = round_trip("how many red squares are there?", "zh");
  const std::string b = round_trip("how many red squares are there?", "zh");
  EXPECT_EQ(a, b);
}

TEST(MockTranslator, UnsupportedPairIsUsageError) {
  EXPECT_THROW(mock_translate("x", "en", "ja"), UsageError);
  EXPECT_THROW(mock_translate("x", "zh", "de"), UsageError);
}

TEST(RuleTable, FirstMatchPerRuleInOrder) {
  RuleTable table;
  table.add("\\ba\\b", "b");
  table.add("\\bb\\b", "c");
  EXPECT_EQ(table.apply("a a"), "c a");
}

TEST(RuleTable, CaptureGroups) {
  const RuleTable table = RuleTable::parse("# comment\n\nhow many (.+) are there\\?\tcount $1\n");
  ASSERT_EQ(table.rules().size(), 1u);
  EXPECT_EQ(table.apply("how many lakes are there?"), "count lakes");
}

TEST(RuleTable, MissingTabIsDataError) {
  EXPECT_THROW(RuleTable::parse("no tab here\n"), DataError);
}

HttpOptions fast_options(const std::string& endpoint, int retries = 3) {
  HttpOptions o;
  o.endpoint = endpoint;
  o.retries = retries;
  o.backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::milliseconds(2000);
  return o;
}

TEST(HttpTranslate, EchoContract) {
  StubServer stub([](const std::string&, const std::string&, const std::string&, int) {
    return StubReply{200, R"({"translatedText":"X"})"};
  });
  EXPECT_EQ(http_translate("hello", "en", "de", fast_options(stub.endpoint())), "X");
  EXPECT_EQ(stub.requests(), 1);
}

TEST(HttpTranslate, SendsLanguagesAndToken) {
  StubServer stub;
  HttpOptions o = fast_options(stub.endpoint());
  o.bearer_token = "secret";
  EXPECT_EQ(http_translate("is there a road?", "en", "fr", o), "fr:is there a road?");
  ASSERT_EQ(stub.auth_headers().size(), 1u);
  EXPECT_EQ(stub.auth_headers()[0], "Bearer secret");
}

TEST(HttpTranslate, RetriesServerErrors) {
  StubServer stub([](const std::string&, const std::string&, const std::string&, int i) {
    if (i < 2) return StubReply{500, "oops"};
    return StubReply{200, R"({"translatedText":"ok"})"};
  });
  EXPECT_EQ(http_translate("hi", "en", "zh", fast_options(stub.endpoint(), 3)), "ok");
  EXPECT_EQ(stub.requests(), 3);
}

TEST(HttpTranslate, GivesUpAfterRetries) {
  StubServer stub([](const std::string&, const std::string&, const std::string&, int) {
    return StubReply{503, ""};
  });
  EXPECT_THROW(http_translate("hi", "en", "zh", fast_options(stub.endpoint(), 2)),
               ExternalError);
  EXPECT_EQ(stub.requests(), 3);
}

TEST(HttpTranslate, ClientErrorIsNotRetried) {
  StubServer stub([](const std::string&, const std::string&, const std::string&, int) {
    return StubReply{400, ""};
  });
  EXPECT_THROW(http_translate("hi", "en", "zh", fast_options(stub.endpoint(), 3)),
               ExternalError);
  EXPECT_EQ(stub.requests(), 1);
}

TEST(HttpTranslate, MalformedBodyNamesEndpoint) {
  StubServer stub([](const std::string&, const std::string&, const std::string&, int) {
    return StubReply{200, "not json"};
  });
  try {
    http_translate("hi", "en", "zh", fast_options(stub.endpoint()));
    FAIL() << "expected ExternalError";
  } catch (const ExternalError& e) {
    EXPECT_NE(std::string(e.what()).find(stub.endpoint()), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("malformed"), std::string::npos) << e.what();
  }
  EXPECT_EQ(stub.requests(), 1);
}

TEST(HttpTranslate, MissingFieldIsMalformed) {
  StubServer stub([](const std::string&, const std::string&, const std::string&, int) {
    return StubReply{200, R"({"text":"X"})"};
  });
  EXPECT_THROW(http_translate("hi", "en", "zh", fast_options(stub.endpoint())),
               ExternalError);
}

TEST(HttpTranslate, UnreachableEndpointNamed) {
  // Bind and release a port so nothing listens on it.
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  const std::string endpoint = "http://127.0.0.1:" + std::to_string(port);
  try {
    http_translate("hi", "en", "zh", fast_options(endpoint, 1));
    FAIL() << "expected ExternalError";
  } catch (const ExternalError& e) {
    EXPECT_NE(std::string(e.what()).find(endpoint), std::string::npos) << e.what();
  }
}

TEST(HttpTranslate, RejectsNonHttpScheme) {
  EXPECT_THROW(http_translate("hi", "en", "zh", fast_options("ftp://host")), UsageError);
}

TEST(HttpTranslator, PivotEndpointOverride) {
  StubServer main_stub, zh_stub;
  HttpTranslator translator(fast_options(main_stub.endpoint()),
                            {{"zh", zh_stub.endpoint()}});
  translator.translate("a", "en", "zh");
  translator.translate("b", "zh", "en");
  translator.translate("c", "en", "de");
  EXPECT_EQ(zh_stub.requests(), 2);
  EXPECT_EQ(main_stub.requests(), 1);
  EXPECT_EQ(translator.requests_issued(), 3u);
}

class CountingTranslator : public Translator {
 public:
  std::string translate(const std::string& text, std::string_view,
                        std::string_view dst) override {
    ++calls;
    return std::string(dst) + "|" + text;
  }
  int calls = 0;
};

TEST(TranslationCache, MissThenHit) {
  StubServer stub;
  HttpTranslator inner(fast_options(stub.endpoint()));
  TranslationCache cache;
  EXPECT_EQ(cached_translate(cache, inner, "hi", "en", "de"), "de:hi");
  EXPECT_EQ(stub.requests(), 1);
  EXPECT_EQ(cached_translate(cache, inner, "hi", "en", "de"), "de:hi");
  EXPECT_EQ(stub.requests(), 1);
}

TEST(TranslationCache, DifferentTargetIsDifferentKey) {
  CountingTranslator inner;
  TranslationCache cache;
  cached_translate(cache, inner, "hi", "en", "de");
  cached_translate(cache, inner, "hi", "en", "fr");
  EXPECT_EQ(inner.calls, 2);
}

TEST(TranslationCache, KeyIsExactText) {
  CountingTranslator inner;
  TranslationCache cache;
  cached_translate(cache, inner, "hi", "en", "de");
  cached_translate(cache, inner, "Hi", "en", "de");
  cached_translate(cache, inner, "hi ", "en", "de");
  EXPECT_EQ(inner.calls, 3);
}

TEST(TranslationCache, ThousandRequestsHundredDistinct) {
  StubServer stub;
  auto inner = std::make_shared<HttpTranslator>(fast_options(stub.endpoint()));
  CachedTranslator cached(std::make_shared<TranslationCache>(), inner);
  for (int i = 0; i < 1000; ++i) {
    const std::string text = "question " + std::to_string(i % 100);
    EXPECT_EQ(cached.translate(text, "en", "zh"), "zh:" + text);
  }
  EXPECT_EQ(stub.requests(), 100);
  EXPECT_EQ(cached.cache().size(), 100u);
}

TEST(TranslationCache, PersistsAcrossInstances) {
  TempDir dir;
  const auto path = dir / "cache.jsonl";
  CountingTranslator inner;
  {
    TranslationCache cache(path);
    cached_translate(cache, inner, "hi\nthere \"x\"", "en", "de");
  }
  TranslationCache reopened(path);
  EXPECT_EQ(reopened.size(), 1u);
  EXPECT_EQ(reopened.lookup("en", "de", "hi\nthere \"x\""), "de|hi\nthere \"x\"");
  cached_translate(reopened, inner, "hi\nthere \"x\"", "en", "de");
  EXPECT_EQ(inner.calls, 1);
}

TEST(TranslationCache, SkipsCorruptLines) {
  TempDir dir;
  const auto path = dir / "cache.jsonl";
  {
    TranslationCache cache(path);
    cache.store("en", "de", "a", "A");
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "{broken\n";
  }
  TranslationCache reopened(path);
  EXPECT_EQ(reopened.lookup("en", "de", "a"), "A");
  EXPECT_FALSE(reopened.warnings().empty());
}

TEST(TranslationCache, LaterLinesWin) {
  TempDir dir;
  const auto path = dir / "cache.jsonl";
  {
    TranslationCache cache(path);
    cache.store("en", "de", "a", "first");
    cache.store("en", "de", "a", "second");
  }
  TranslationCache reopened(path);
  EXPECT_EQ(reopened.lookup("en", "de", "a"), "second");
}

TEST(TranslationCache, UnwritableFileWarnsAndSkips) {
  TempDir dir;
  TranslationCache cache(dir / "missing-dir" / "cache.jsonl");
  CountingTranslator inner;
  EXPECT_EQ(cached_translate(cache, inner, "a", "en", "de"), "de|a");
  EXPECT_FALSE(cache.warnings().empty());
}

}  // namespace
}  // namespace rsvqa
