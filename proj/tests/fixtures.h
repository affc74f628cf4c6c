#ifndef SEMSEARCH_TESTS_FIXTURES_H_
#define SEMSEARCH_TESTS_FIXTURES_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>

namespace semsearch::testing {

// Entities from the GM/Chrysler news passage, the Paris examples, and the
// George Washington / South Bend questions.
inline constexpr std::string_view kNewsKb = R"(# fixture knowledge base
#CLASSES
Location	Location
Country	Country	Location
Region	Region	Location
State	State	Location
City	City	Location
CountryCapital	Country Capital	City
Agent	Agent
Person	Person	Agent
Woman	Woman	Person
Organization	Organization	Agent
Company	Company	Organization
#ENTITIES
#Company_123	Company	General Motors	GM
#Company_Chrysler	Company	Chrysler
#Country_US	Country	United States	US|U.S.|USA
#City_Paris_FR	CountryCapital	Paris	Paris, France
#City_Paris_TX	City	Paris, Texas
#Person_ParisHilton	Woman	Paris Hilton	Paris
#GeorgeWashington	Person	George Washington
#WestmorelandCountry	Region	Westmoreland Country
#SouthBend	City	South Bend
#Indiana	State	Indiana
#Indianapolis	City	Indianapolis
#SoutheastAsia	Region	Southeast Asia
#Indonesia	Country	Indonesia
#Philippines	Country	Philippines
#Congo	Country	Congo
#Kinshasa	CountryCapital	Kinshasa
#RELATIONS
bornIn	born in
locatedIn	located in
partOf	part of
actedIn	acted in
wrote	wrote
isCitizenOf	is citizen of
hasCapital	has capital
#FACTS
#GeorgeWashington	bornIn	#WestmorelandCountry
#SouthBend	locatedIn	#Indiana
#Indianapolis	locatedIn	#Indiana
#Indonesia	partOf	#SoutheastAsia
#Philippines	partOf	#SoutheastAsia
#Congo	hasCapital	#Kinshasa
)";

// Relation phrases used with kNewsKb. "flew over" is a known phrase with no
// mapping; "orbits" maps to a relation the KB lacks.
inline constexpr std::string_view kNewsPhrases = R"(was actress in	actedIn
is author of	wrote
nationality is	isCitizenOf
born	bornIn
where is	locatedIn
in	partOf
capital of	hasCapital
flew over
orbits	orbits
)";

inline constexpr std::string_view kInterrogatives = R"(who	actress	Woman
who		Person
which	city	City
which		Person
where	berth	WaterRegion
where		Location
what	capital	CountryCapital
what	limit	Percent
when		DayTime
how	much	Money
)";

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("semsearch_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }

  std::string Write(const std::string &name, std::string_view content) const {
    auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadAll(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace semsearch::testing

#endif  // SEMSEARCH_TESTS_FIXTURES_H_
