#include "lexicon.hpp"

#include <string>
#include <unordered_map>
#include <unordered_set>

namespace lgm::lexicon {
namespace {

using WordSet = std::unordered_set<std::string_view>;
using WordMap = std::unordered_map<std::string_view, std::string_view>;

WordSet words(std::string_view list) {
  WordSet out;
  std::size_t i = 0;
  while (i < list.size()) {
    while (i < list.size() && (list[i] == ' ' || list[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < list.size() && list[j] != ' ' && list[j] != '\n') ++j;
    if (j > i) out.insert(list.substr(i, j - i));
    i = j;
  }
  return out;
}

// "form:lemma form:lemma ..."
WordMap pairs(std::string_view list) {
  WordMap out;
  for (auto entry : words(list)) {
    auto colon = entry.find(':');
    out.emplace(entry.substr(0, colon), entry.substr(colon + 1));
  }
  return out;
}

const WordSet& determiners() {
  static const WordSet s = words(
      "a an the this that these those each every either neither some any no "
      "all both another such what's whose my your our");
  return s;
}

const WordSet& pronouns() {
  static const WordSet s = words(
      "i me you he him she her it we us they them his its their theirs hers "
      "mine yours ours himself herself itself themselves myself yourself "
      "ourselves one someone something anyone anything everyone everything "
      "nobody nothing who whom what which whoever whatever");
  return s;
}

const WordSet& prepositions() {
  static const WordSet s = words(
      "of in on at by for with about against between into through during "
      "before after above below to from up down out off over under again "
      "further near across along among around behind beside besides beyond "
      "despite except inside outside per since than toward towards upon via "
      "within without throughout like unlike onto amid as");
  return s;
}

const WordSet& coordinators() {
  static const WordSet s = words("and or but nor yet so plus");
  return s;
}

const WordSet& subordinators() {
  static const WordSet s = words(
      "because although though while whereas if unless until whether once "
      "when where why how whenever wherever");
  return s;
}

const WordSet& auxiliaries() {
  static const WordSet s = words(
      "be is are was were am been being have has had having do does did "
      "will would shall should can could may might must 's 're 've 'd 'll");
  return s;
}

const WordSet& particles() {
  static const WordSet s = words("not n't 'm");
  return s;
}

const WordMap& closed_lemmas() {
  static const WordMap m = pairs(
      "is:be are:be was:be were:be am:be been:be being:be 're:be 'm:be "
      "has:have had:have having:have 've:have does:do did:do "
      "n't:not me:i him:he her:she us:we them:they");
  return m;
}

const WordSet& verbs() {
  static const WordSet s = words(
      "accept achieve act add affect agree aid allow analyze anchor answer "
      "appear apply argue arrive ask attack attend avoid award base become "
      "begin believe belong bleed blend borrow break breathe bring build burn buy "
      "call capture carry cause change charge check choose cite claim clean "
      "close collect combine come compare compete complete compose concern "
      "confirm connect consider consist construct consume contain continue "
      "contribute control convert cook cost count cover create cross cut "
      "damage deal decide declare decompose define delay deliver denote "
      "depend derive describe design destroy determine develop devastate die "
      "differ discover discuss distribute divide do draw drink drive drop eat "
      "elect embody emerge employ enable encase encompass end enhance enjoy "
      "ensure enter entice establish estimate evaluate examine exceed exhibit "
      "exist expand expect explain explore express extend extract face fall "
      "feature feed feel fight fill find finish fit fly focus follow forget form "
      "found function gain get give go govern grow guide handle happen harness "
      "hate have hear help hold host identify illustrate imagine improve "
      "include incorporate increase indicate influence inform inherit "
      "interact introduce invent involve join keep kill know lack last lead "
      "learn leave let lie like link listen live locate look lose love maintain "
      "make manage manufacture mark marry match mean measure meet merge "
      "mitigate move name need note obtain occur offer open operate organize "
      "own participate pass pay perform permit place plan play point possess "
      "prefer prepare present preserve prevent print proceed process produce "
      "promote propagate protect prove provide publish pull purchase push put "
      "quote raise range reach read realize receive recognize recommend "
      "record reduce refer reflect regard regulate reject relate release "
      "rely remain remember remove replace report represent reproduce require "
      "research reside resolve respond rest result retain return reveal ripen "
      "rise roll run save say see seek seem sell send serve set share shed "
      "shift show sign sing sit sleep speak spend split stand start state stay "
      "steal stop store structure study succeed suggest supply support "
      "surround survive synthesize take talk teach tell tend test thank think "
      "threaten throw transfer transform transport travel treat try turn "
      "understand use utilize vary visit wait walk want watch wear win wish "
      "work worry write yield");
  return s;
}

const WordSet& adjectives() {
  static const WordSet s = words(
      "able active actual alive ancient annual apparent available aware bad "
      "basic beautiful beneficial best better big black blue bright broad "
      "brown busy calm capable central certain cheap chief chronic "
      "clear cold common complete complex critical crisp cultural "
      "current daily dark dead deep delicious different difficult direct "
      "disposable distinct distinctive diverse dry due early easy economic "
      "edible effective elongated entire equal essential evergreen "
      "excellent extensive external extreme fair false famous far fast few "
      "final fine firm flat fleshy flowering foreign formal former free fresh "
      "full fundamental general global good great green happy hard healthy "
      "heavy high hollow hot huge important inner internal juicy "
      "large late lateral least left legal less likely little local long low "
      "main major many mature medical modern more most much multiple native "
      "natural necessary new nice normal old only ordinary original other "
      "outer own particular perennial personal physical plain political poor "
      "popular possible potential pretty previous primary principal "
      "private proper protective public pure purple quick rare ready real "
      "recent red regular relevant rich right ripe round sad safe same "
      "seasonal secondary several shallow sharp short significant similar "
      "simple single small social soft sour special specific starchy sterile "
      "straight strong such sudden sweet tall thick thin tiny total "
      "traditional tropical true typical unique unusual upper urban useful "
      "usual valuable various vast vibrant visible warm weak white whole wide "
      "wild woody wrong yellow young");
  return s;
}

const WordSet& adverbs() {
  static const WordSet s = words(
      "also already always annually almost away back even ever everywhere "
      "here however instead just later maybe never now often once only "
      "perhaps quite rather really sometimes soon still then there therefore "
      "thus together too very well worldwide yet ago else enough indeed "
      "otherwise nevertheless furthermore moreover not");
  return s;
}

const WordSet& nouns() {
  static const WordSet s = words(
      "apple fruit thing water light form use need cause change end fall "
      "fight plan play point report result rest return run set share show "
      "sign stand start state study support test turn work name record face "
      "place process structure function feature design answer claim cost "
      "control cover cut deal drink drop guide host mark match note offer "
      "range reach release research respond store transport treat visit "
      "prize leaf root stem tree cup vessel peel flesh core question number "
      "people time year day way man woman child world life hand part kind type "
      "category class member group country city company system program "
      "story problem fact level order");
  return s;
}

const WordMap& irregular_verbs() {
  static const WordMap m = pairs(
      "arose:arise arisen:arise ate:eat eaten:eat became:become began:begin "
      "begun:begin bit:bite bitten:bite bled:bleed blew:blow blown:blow "
      "broke:break broken:break bred:breed brought:bring built:build "
      "burnt:burn bought:buy caught:catch chose:choose chosen:choose "
      "came:come dealt:deal dug:dig drew:draw drawn:draw drank:drink "
      "drunk:drink drove:drive driven:drive fell:fall fallen:fall fed:feed "
      "felt:feel fought:fight found:find fled:flee flew:fly flown:fly "
      "forgot:forget forgotten:forget froze:freeze frozen:freeze got:get "
      "gotten:get gave:give given:give went:go gone:go goes:go grew:grow "
      "grown:grow hung:hang heard:hear hid:hide hidden:hide held:hold "
      "kept:keep knew:know known:know laid:lay led:lead left:leave lent:lend "
      "lay:lie lain:lie lost:lose made:make meant:mean met:meet paid:pay "
      "rode:ride ridden:ride rang:ring rung:ring rose:rise risen:rise ran:run "
      "said:say saw:see seen:see sought:seek sold:sell sent:send shook:shake "
      "shaken:shake shone:shine shot:shoot shown:show shrank:shrink sang:sing "
      "sung:sing sank:sink sat:sit slept:sleep spoke:speak spoken:speak "
      "spent:spend spun:spin sprang:spring stood:stand stole:steal "
      "stolen:steal stuck:stick struck:strike swore:swear swept:sweep "
      "swam:swim swum:swim took:take taken:take taught:teach tore:tear "
      "torn:tear told:tell thought:think threw:throw thrown:throw "
      "understood:understand woke:wake wore:wear worn:wear won:win wound:wind "
      "wrote:write written:write withheld:withhold underwent:undergo "
      "undergone:undergo overcame:overcome shed:shed");
  return m;
}

const WordMap& irregular_nouns() {
  static const WordMap m = pairs(
      "men:man women:woman children:child people:person mice:mouse "
      "teeth:tooth feet:foot geese:goose leaves:leaf lives:life knives:knife "
      "wives:wife halves:half wolves:wolf calves:calf loaves:loaf "
      "shelves:shelf thieves:thief selves:self oxen:ox criteria:criterion "
      "phenomena:phenomenon cacti:cactus fungi:fungus nuclei:nucleus "
      "stimuli:stimulus analyses:analysis theses:thesis crises:crisis "
      "bases:base potatoes:potato tomatoes:tomato heroes:hero echoes:echo "
      "vetoes:veto species:species series:series mycorrhizae:mycorrhiza "
      "berries:berry");
  return m;
}

const WordSet& final_s_words() {
  static const WordSet s = words(
      "this is was has his its us yes thus always perhaps whereas across "
      "news physics mathematics economics politics ethics species series "
      "gas bus lens atlas canvas chaos bias iris virus census corpus status "
      "genus campus bonus focus apparatus octopus cactus fungus nucleus "
      "stimulus analysis thesis crisis basis axis diabetes measles glass "
      "grass class mass boss loss moss kiss less unless various famous "
      "previous numerous delicious serious obvious nervous dangerous "
      "continuous enormous ambitious religious anonymous analogous "
      "herbaceous deciduous means headquarters plus");
  return s;
}

const WordSet& abbreviations() {
  static const WordSet s = words(
      "mr mrs ms dr st jr sr prof vs etc e.g i.e inc ltd co no fig mt gen "
      "col lt sgt rev approx dept est");
  return s;
}

const WordSet& title_abbreviations() {
  static const WordSet s = words("mr mrs ms dr st prof mt gen col lt sgt rev");
  return s;
}

}  // namespace

std::optional<Pos> closed_class(std::string_view w) {
  if (w == "to") return Pos::Part;
  if (w == "there" || w == "here") return Pos::Adv;
  if (auxiliaries().contains(w)) return Pos::Aux;
  if (particles().contains(w)) return Pos::Part;
  if (determiners().contains(w)) return Pos::Det;
  if (pronouns().contains(w)) return Pos::Pronoun;
  if (coordinators().contains(w)) return Pos::CConj;
  if (subordinators().contains(w)) return Pos::SConj;
  if (prepositions().contains(w)) return Pos::Adp;
  return std::nullopt;
}

std::optional<std::string_view> closed_class_lemma(std::string_view w) {
  auto it = closed_lemmas().find(w);
  if (it == closed_lemmas().end()) return std::nullopt;
  return it->second;
}

bool is_verb(std::string_view base) {
  return verbs().contains(base);
}
bool is_adjective(std::string_view w) {
  return adjectives().contains(w);
}
bool is_adverb(std::string_view w) {
  return adverbs().contains(w);
}
bool is_noun(std::string_view base) {
  return nouns().contains(base);
}

std::optional<std::string_view> irregular_verb(std::string_view form) {
  auto it = irregular_verbs().find(form);
  if (it == irregular_verbs().end()) return std::nullopt;
  return it->second;
}

std::optional<std::string_view> irregular_noun(std::string_view form) {
  auto it = irregular_nouns().find(form);
  if (it == irregular_nouns().end()) return std::nullopt;
  return it->second;
}

bool keeps_final_s(std::string_view w) {
  return final_s_words().contains(w);
}
bool is_abbreviation(std::string_view w) {
  return abbreviations().contains(w);
}
bool is_title_abbreviation(std::string_view w) {
  return title_abbreviations().contains(w);
}

bool is_third_person_pronoun(std::string_view w) {
  static const WordSet s = words(
      "he him his himself she her hers herself it its itself they them their "
      "theirs themselves");
  return s.contains(w);
}

bool is_plural_pronoun(std::string_view w) {
  static const WordSet s = words("they them their theirs themselves");
  return s.contains(w);
}

bool is_determiner_like(std::string_view w) {
  return determiners().contains(w) || w == "his" || w == "her" || w == "its" || w == "their";
}

}  // namespace lgm::lexicon
