#include "msgclass/synthetic.hpp"

namespace msgclass {

namespace {

// Slovene-flavoured chat vocabulary; every feature family gets something to
// find: pools carry BoW/lexicon signal, styles carry surface signal, label
// chains carry temporal signal.
constexpr const char* kDefaultConfig = R"json({
  "format_version": 1,
  "messages": 3000,
  "schools": 3,
  "cohorts": 2,
  "users_per_stream": 6,
  "repeat_poster": 0.3,
  "start": "2019-03-04T08:00:00Z",
  "mean_gap_seconds": 45,
  "books": ["kekec", "butalci", "krpan"],
  "min_words": 1,
  "max_words": 8,
  "variant_rate": 0.25,
  "filler": ["in", "pa", "to", "je", "da", "na", "v", "se", "mi", "ti", "še", "že", "tudi", "samo", "zelo",
             "nekaj", "danes", "potem", "tam", "tukaj", "vsi", "kar", "bo", "smo", "ste", "mal", "dost"],
  "objectives": [
    {
      "name": "relevance",
      "labels": ["no", "yes"],
      "probabilities": [0.61, 0.39],
      "persistence": 0.7,
      "signal": 0.35,
      "pools": {
        "yes": ["knjiga", "knjige", "zgodba", "zgodbe", "poglavje", "junak", "junaka", "avtor", "konec", "prebral",
                "brala", "stran", "lik", "pravljica", "odlomek", "dogajanje", "glavni", "pisatelj", "naslov",
                "zanimiva", "sporočilo", "{book}", "mislim", "ker"],
        "no": ["hej", "lol", "haha", "dolgcas", "igra", "malica", "telefon", "jutri", "včeraj", "film", "nogomet",
               "glasba", "{username}", "xd", "ok", "pridi", "doma", "zabava", "vikend", "fak", "bedak", "sranje"]
      },
      "styles": {
        "yes": {"capitalize": 0.4, "period": 0.25},
        "no": {"stretch": 0.25, "digits": 0.1, "exclaim": 0.15}
      }
    },
    {
      "name": "type",
      "labels": ["A", "Q", "S"],
      "probabilities": [0.327, 0.19, 0.483],
      "persistence": 0.4,
      "signal": 0.2,
      "pools": {
        "Q": ["ali", "kaj", "zakaj", "kdo", "kako", "kdaj", "kje", "koliko", "kateri", "veš"],
        "A": ["ja", "ne", "mogoče", "seveda", "zato", "res", "vem", "tako", "točno", "lahko"],
        "S": ["jaz", "menim", "všeč", "rad", "zanimivo", "dolgo", "super", "dobro", "slabo", "sem"]
      },
      "styles": {
        "Q": {"question_mark": 0.85},
        "A": {"period": 0.3},
        "S": {"period": 0.45, "capitalize": 0.5}
      }
    },
    {
      "name": "category_broad",
      "labels": ["chatting", "discussion", "identity", "moderation", "other", "switching"],
      "probabilities": [0.403, 0.231, 0.231, 0.045, 0.08, 0.01],
      "persistence": 0.6,
      "signal": 0.25,
      "pools": {
        "chatting": ["hej", "živjo", "lol", "haha", "kul", "xd", "ej", "dej", "no", "bedak"],
        "discussion": ["knjiga", "junak", "zgodba", "konec", "avtor", "lik", "pomen", "sporočilo", "tema", "{book}"],
        "identity": ["{name}", "ime", "jaz", "kdo", "{username}", "fant", "punca", "razred", "sem"],
        "moderation": ["pišite", "nehaj", "pazi", "pravila", "prosim", "učitelj", "nalogo", "delajte", "tiho"],
        "other": ["hmm", "aha", "ok", "mhm", "nevem", "pač"],
        "switching": ["grem", "adijo", "pridem", "nazaj", "čakaj", "zdaj", "lp"]
      },
      "styles": {
        "chatting": {"stretch": 0.35, "gibberish": 0.1, "exclaim": 0.2},
        "identity": {"capitalize": 0.5, "digits": 0.2},
        "moderation": {"shout": 0.3, "exclaim": 0.5},
        "switching": {"period": 0.3}
      }
    }
  ],
  "lexicons": {
    "normalization": {
      "sm": "sem", "js": "jaz", "jst": "jaz", "kva": "kaj", "zakva": "zakaj", "knjga": "knjiga", "neki": "nekaj",
      "dons": "danes", "tud": "tudi", "mogoce": "mogoče", "usec": "všeč", "pol": "potem", "nevem": "ne vem",
      "mal": "malo", "dost": "dosti", "zivjo": "živjo", "ucitelj": "učitelj", "pac": "pač", "kok": "koliko",
      "kak": "kako"
    },
    "lemmas": {
      "knjige": "knjiga", "zgodbe": "zgodba", "junaka": "junak", "prebral": "prebrati", "brala": "brati",
      "sem": "biti", "je": "biti", "smo": "biti", "ste": "biti", "bo": "biti", "mislim": "misliti", "vem": "vedeti",
      "grem": "iti", "pridem": "priti", "pridi": "priti", "pišite": "pisati", "delajte": "delati",
      "zanimiva": "zanimiv", "glavni": "glavni", "veš": "vedeti", "menim": "meniti", "nehaj": "nehati"
    },
    "pos": {
      "knjiga": "noun:common", "knjige": "noun:common", "zgodba": "noun:common", "zgodbe": "noun:common",
      "poglavje": "noun:common", "junak": "noun:common", "junaka": "noun:common", "avtor": "noun:common",
      "konec": "noun:common", "stran": "noun:common", "lik": "noun:common", "pravljica": "noun:common",
      "pisatelj": "noun:common", "naslov": "noun:common", "igra": "noun:common", "malica": "noun:common",
      "telefon": "noun:common", "film": "noun:common", "nogomet": "noun:common", "glasba": "noun:common",
      "učitelj": "noun:common", "pravila": "noun:common", "nalogo": "noun:common", "ime": "noun:common",
      "fant": "noun:common", "punca": "noun:common", "razred": "noun:common", "kekec": "noun:proper",
      "butalci": "noun:proper", "krpan": "noun:proper", "jakob": "noun:proper", "ana": "noun:proper",
      "sem": "verb:auxiliary", "je": "verb:auxiliary", "bo": "verb:auxiliary", "smo": "verb:auxiliary",
      "ste": "verb:auxiliary", "prebral": "verb:main", "brala": "verb:main", "mislim": "verb:main",
      "vem": "verb:main", "grem": "verb:main", "pridem": "verb:main", "pridi": "verb:main", "pišite": "verb:main",
      "delajte": "verb:main", "nehaj": "verb:main", "pazi": "verb:main", "čakaj": "verb:main", "menim": "verb:main",
      "veš": "verb:main", "zanimiva": "adjective:general", "glavni": "adjective:general",
      "dober": "adjective:general", "kul": "adjective:general", "dolgo": "adverb:general",
      "dobro": "adverb:general", "slabo": "adverb:general", "zelo": "adverb:general", "danes": "adverb:general",
      "jutri": "adverb:general", "včeraj": "adverb:general", "potem": "adverb:general", "zdaj": "adverb:general",
      "tukaj": "adverb:general", "tam": "adverb:general", "nazaj": "adverb:general", "doma": "adverb:general",
      "jaz": "pronoun:personal", "mi": "pronoun:personal", "ti": "pronoun:personal", "to": "pronoun:demonstrative",
      "kaj": "pronoun:interrogative", "kdo": "pronoun:interrogative", "kateri": "pronoun:interrogative",
      "zakaj": "adverb:interrogative", "kako": "adverb:interrogative", "kdaj": "adverb:interrogative",
      "kje": "adverb:interrogative", "koliko": "adverb:interrogative", "in": "conjunction:coordinating",
      "pa": "conjunction:coordinating", "da": "conjunction:subordinating", "ker": "conjunction:subordinating",
      "zato": "conjunction:coordinating", "v": "preposition:general", "na": "preposition:general",
      "ali": "particle:general", "še": "particle:general", "že": "particle:general", "tudi": "particle:general",
      "samo": "particle:general", "ja": "particle:general", "ne": "particle:general", "seveda": "particle:general",
      "res": "particle:general", "hej": "interjection:general", "haha": "interjection:general",
      "lol": "abbreviation:general", "xd": "abbreviation:general", "ok": "abbreviation:general",
      "lp": "abbreviation:general", "aha": "interjection:general", "hmm": "interjection:general",
      "živjo": "interjection:general", "adijo": "interjection:general"
    },
    "curse_words": ["fak", "bedak", "sranje", "idiot", "prasec"],
    "given_names": ["jakob", "ana", "luka", "nika", "maja", "tim", "eva", "žan", "lana", "nejc"],
    "chat_usernames": ["sonček12", "mačka", "kul_fant", "zmajček", "bralec7", "luna", "ninja", "pikica", "tigr",
                       "bananca", "rokec", "zvezdica"],
    "book_names": ["kekec", "butalci", "krpan", "pedenjped", "galeb"],
    "key_lemmas": ["knjiga", "brati", "prebrati", "junak", "zgodba", "avtor", "konec", "poglavje", "pisatelj"]
  }
})json";

}  // namespace

const nlohmann::json& default_generator_json() {
  static const nlohmann::json doc = nlohmann::json::parse(kDefaultConfig);
  return doc;
}

}  // namespace msgclass
