// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/synth.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <string>

#include "gap/error.hpp"

namespace gap {

namespace {

const std::array<const char*, 16> kFirst = {"alan",  "maria", "james", "sofia", "peter",  "laura", "david", "anna",
                                            "oscar", "irene", "victor", "clara", "martin", "elena", "simon", "nora"};
const std::array<const char*, 16> kLast = {"bean",   "costa",  "walker", "novak", "hughes", "silva",
                                           "keller", "morgan", "dunn",   "ferris", "quinn",  "baker",
                                           "lindqvist", "okafor", "reyes", "tanaka"};
const std::array<const char*, 12> kCities = {"wheeler", "lisbon", "porto", "graz",   "leeds",  "bergen",
                                             "aarhus",  "lyon",   "turin", "malaga", "krakow", "utrecht"};
const std::array<const char*, 8> kCountries = {"portugal", "austria", "england", "norway",
                                               "denmark",  "france",  "italy",   "spain"};
const std::array<const char*, 8> kJobs = {"test pilot", "painter", "surgeon", "architect",
                                          "journalist", "chemist", "composer", "lawyer"};
const std::array<const char*, 6> kUniversities = {"saint clare college", "north ridge university", "hollow institute",
                                                  "eastfield academy",   "riverside college",     "mount vale school"};

struct Fact {
  int head;  // role indices below
  const char* relation;
  int tail;
  const char* pattern;  // {h} and {t} are replaced by the labels
};

enum Role { kPerson, kCity, kJob, kCountry, kSpouse, kUniversity, kCityCountry, kSpouseJob, kUniCity, kSpouseCity };

const std::array<Fact, 9> kFacts = {{
    {kPerson, "birth place", kCity, "{h} was born in {t} ."},
    {kPerson, "occupation", kJob, "{h} works as a {t} ."},
    {kPerson, "nationality", kCountry, "{h} is from {t} ."},
    {kPerson, "spouse", kSpouse, "{h} is married to {t} ."},
    {kPerson, "alma mater", kUniversity, "{h} studied at {t} ."},
    {kCity, "country", kCityCountry, "{h} is located in {t} ."},
    {kSpouse, "occupation", kSpouseJob, "{h} works as a {t} ."},
    {kUniversity, "city", kUniCity, "{h} is in {t} ."},
    {kSpouse, "birth place", kSpouseCity, "{h} was born in {t} ."},
}};

std::string slug(const std::string& label) {
  std::string s = label;
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

std::string fill(std::string pattern, const std::string& h, const std::string& t) {
  pattern.replace(pattern.find("{h}"), 3, h);
  pattern.replace(pattern.find("{t}"), 3, t);
  return pattern;
}

}  // namespace

std::vector<Example> synthetic_corpus(const SynthOptions& options) {
  if (options.min_triples == 0 || options.min_triples > options.max_triples || options.max_triples > kFacts.size()) {
    throw Error(ErrorCode::InvalidConfig, "triple counts must satisfy 1 <= min <= max <= 9");
  }
  std::mt19937_64 rng(options.seed);
  auto pick = [&](const auto& pool) -> std::string {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  auto person = [&] { return pick(kFirst) + " " + pick(kLast); };

  std::vector<Example> out;
  for (std::size_t n = 0; n < options.count; ++n) {
    std::array<std::string, 10> role;
    role[kPerson] = person();
    do {
      role[kSpouse] = person();
    } while (role[kSpouse] == role[kPerson]);
    role[kCity] = pick(kCities);
    role[kJob] = pick(kJobs);
    role[kCountry] = pick(kCountries);
    role[kUniversity] = pick(kUniversities);
    role[kCityCountry] = pick(kCountries);
    role[kSpouseJob] = pick(kJobs);
    role[kUniCity] = pick(kCities);
    role[kSpouseCity] = pick(kCities);

    const std::size_t k =
        std::uniform_int_distribution<std::size_t>(options.min_triples, options.max_triples)(rng);
    std::array<std::size_t, kFacts.size()> idx{};
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + static_cast<long>(k));
    std::sort(chosen.begin(), chosen.end());

    Example ex;
    ex.id = "synth-" + std::to_string(n);
    std::map<std::string, bool> seen_entity, seen_relation;
    std::string text;
    auto add_entity = [&](const std::string& label) {
      if (!seen_entity[label]) {
        seen_entity[label] = true;
        ex.graph.entities.push_back({slug(label), label});
      }
    };
    for (std::size_t f : chosen) {
      const Fact& fact = kFacts[f];
      const std::string& h = role[static_cast<std::size_t>(fact.head)];
      const std::string& t = role[static_cast<std::size_t>(fact.tail)];
      add_entity(h);
      add_entity(t);
      const std::string rel = fact.relation;
      if (!seen_relation[rel]) {
        seen_relation[rel] = true;
        ex.graph.relations.push_back({slug(rel), rel});
      }
      ex.graph.triples.push_back({slug(h), slug(rel), slug(t)});
      if (!text.empty()) text += ' ';
      text += fill(fact.pattern, h, t);
    }
    ex.references.push_back(text);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace gap
