#include "polya/stopwords.hpp"

#include <istream>
#include <sstream>

namespace polya {
namespace {

// SMART stopword list, identical to core/data/smart_stopwords.txt.
constexpr const char kSmartList[] =
    "a\na's\nable\nabout\nabove\naccording\naccordingly\nacross\nactually\n"
    "after\nafterwards\nagain\nagainst\nain't\nall\nallow\nallows\nalmost\n"
    "alone\nalong\nalready\nalso\nalthough\nalways\nam\namong\namongst\n"
    "an\nand\nanother\nany\nanybody\nanyhow\nanyone\nanything\nanyway\n"
    "anyways\nanywhere\napart\nappear\nappreciate\nappropriate\nare\n"
    "aren't\naround\nas\naside\nask\nasking\nassociated\nat\navailable\n"
    "away\nawfully\nb\nbe\nbecame\nbecause\nbecome\nbecomes\nbecoming\n"
    "been\nbefore\nbeforehand\nbehind\nbeing\nbelieve\nbelow\nbeside\n"
    "besides\nbest\nbetter\nbetween\nbeyond\nboth\nbrief\nbut\nby\nc\n"
    "c'mon\nc's\ncame\ncan\ncan't\ncannot\ncant\ncause\ncauses\ncertain\n"
    "certainly\nchanges\nclearly\nco\ncom\ncome\ncomes\nconcerning\n"
    "consequently\nconsider\nconsidering\ncontain\ncontaining\ncontains\n"
    "corresponding\ncould\ncouldn't\ncourse\ncurrently\nd\ndefinitely\n"
    "described\ndespite\ndid\ndidn't\ndifferent\ndo\ndoes\ndoesn't\ndoing\n"
    "don't\ndone\ndown\ndownwards\nduring\ne\neach\nedu\neg\neight\n"
    "either\nelse\nelsewhere\nenough\nentirely\nespecially\net\netc\neven\n"
    "ever\nevery\neverybody\neveryone\neverything\neverywhere\nex\n"
    "exactly\nexample\nexcept\nf\nfar\nfew\nfifth\nfirst\nfive\nfollowed\n"
    "following\nfollows\nfor\nformer\nformerly\nforth\nfour\nfrom\n"
    "further\nfurthermore\ng\nget\ngets\ngetting\ngiven\ngives\ngo\ngoes\n"
    "going\ngone\ngot\ngotten\ngreetings\nh\nhad\nhadn't\nhappens\nhardly\n"
    "has\nhasn't\nhave\nhaven't\nhaving\nhe\nhe's\nhello\nhelp\nhence\n"
    "her\nhere\nhere's\nhereafter\nhereby\nherein\nhereupon\nhers\n"
    "herself\nhi\nhim\nhimself\nhis\nhither\nhopefully\nhow\nhowbeit\n"
    "however\ni\ni'd\ni'll\ni'm\ni've\nie\nif\nignored\nimmediate\nin\n"
    "inasmuch\ninc\nindeed\nindicate\nindicated\nindicates\ninner\n"
    "insofar\ninstead\ninto\ninward\nis\nisn't\nit\nit'd\nit'll\nit's\n"
    "its\nitself\nj\njust\nk\nkeep\nkeeps\nkept\nknow\nknown\nknows\nl\n"
    "last\nlately\nlater\nlatter\nlatterly\nleast\nless\nlest\nlet\nlet's\n"
    "like\nliked\nlikely\nlittle\nlook\nlooking\nlooks\nltd\nm\nmainly\n"
    "many\nmay\nmaybe\nme\nmean\nmeanwhile\nmerely\nmight\nmore\nmoreover\n"
    "most\nmostly\nmuch\nmust\nmy\nmyself\nn\nname\nnamely\nnd\nnear\n"
    "nearly\nnecessary\nneed\nneeds\nneither\nnever\nnevertheless\nnew\n"
    "next\nnine\nno\nnobody\nnon\nnone\nnoone\nnor\nnormally\nnot\n"
    "nothing\nnovel\nnow\nnowhere\no\nobviously\nof\noff\noften\noh\nok\n"
    "okay\nold\non\nonce\none\nones\nonly\nonto\nor\nother\nothers\n"
    "otherwise\nought\nour\nours\nourselves\nout\noutside\nover\noverall\n"
    "own\np\nparticular\nparticularly\nper\nperhaps\nplaced\nplease\nplus\n"
    "possible\npresumably\nprobably\nprovides\nq\nque\nquite\nqv\nr\n"
    "rather\nrd\nre\nreally\nreasonably\nregarding\nregardless\nregards\n"
    "relatively\nrespectively\nright\ns\nsaid\nsame\nsaw\nsay\nsaying\n"
    "says\nsecond\nsecondly\nsee\nseeing\nseem\nseemed\nseeming\nseems\n"
    "seen\nself\nselves\nsensible\nsent\nserious\nseriously\nseven\n"
    "several\nshall\nshe\nshould\nshouldn't\nsince\nsix\nso\nsome\n"
    "somebody\nsomehow\nsomeone\nsomething\nsometime\nsometimes\nsomewhat\n"
    "somewhere\nsoon\nsorry\nspecified\nspecify\nspecifying\nstill\nsub\n"
    "such\nsup\nsure\nt\nt's\ntake\ntaken\ntell\ntends\nth\nthan\nthank\n"
    "thanks\nthanx\nthat\nthat's\nthats\nthe\ntheir\ntheirs\nthem\n"
    "themselves\nthen\nthence\nthere\nthere's\nthereafter\nthereby\n"
    "therefore\ntherein\ntheres\nthereupon\nthese\nthey\nthey'd\nthey'll\n"
    "they're\nthey've\nthink\nthird\nthis\nthorough\nthoroughly\nthose\n"
    "though\nthree\nthrough\nthroughout\nthru\nthus\nto\ntogether\ntoo\n"
    "took\ntoward\ntowards\ntried\ntries\ntruly\ntry\ntrying\ntwice\ntwo\n"
    "u\nun\nunder\nunfortunately\nunless\nunlikely\nuntil\nunto\nup\nupon\n"
    "us\nuse\nused\nuseful\nuses\nusing\nusually\nuucp\nv\nvalue\nvarious\n"
    "very\nvia\nviz\nvs\nw\nwant\nwants\nwas\nwasn't\nway\nwe\nwe'd\n"
    "we'll\nwe're\nwe've\nwelcome\nwell\nwent\nwere\nweren't\nwhat\n"
    "what's\nwhatever\nwhen\nwhence\nwhenever\nwhere\nwhere's\nwhereafter\n"
    "whereas\nwhereby\nwherein\nwhereupon\nwherever\nwhether\nwhich\n"
    "while\nwhither\nwho\nwho's\nwhoever\nwhole\nwhom\nwhose\nwhy\nwill\n"
    "willing\nwish\nwith\nwithin\nwithout\nwon't\nwonder\nwould\nwouldn't\n"
    "x\ny\nyes\nyet\nyou\nyou'd\nyou'll\nyou're\nyou've\nyour\nyours\n"
    "yourself\nyourselves\nz\nzero\n"
;

}  // namespace

std::unordered_set<std::string> load_stopwords(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    while (fields >> word) words.insert(word);
  }
  return words;
}

const std::unordered_set<std::string>& smart_stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::istringstream in(kSmartList);
    return load_stopwords(in);
  }();
  return words;
}

}  // namespace polya
