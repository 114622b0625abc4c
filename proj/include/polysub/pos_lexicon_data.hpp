// Copyright 2026 The Polysub Authors.
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

#ifndef POLYSUB_POS_LEXICON_DATA_HPP_
#define POLYSUB_POS_LEXICON_DATA_HPP_

#include <string_view>

#include "polysub/core.hpp"

namespace polysub {

// Contents of data/pos_lexicon.tsv; a unit test keeps the two in sync.
inline constexpr std::string_view kBuiltinPosLexicon = R"TSV(
# Bundled word -> most frequent coarse tag lexicon.
# Format: word<TAB>tag with tag in {noun, verb, adj, adv, other}.
movie	noun
film	noun
story	noun
plot	noun
actor	noun
actress	noun
director	noun
scene	noun
script	noun
cast	noun
character	noun
music	noun
performance	noun
ending	noun
book	noun
show	noun
series	noun
drama	noun
comedy	noun
thriller	noun
time	noun
year	noun
day	noun
people	noun
man	noun
woman	noun
family	noun
friend	noun
child	noun
world	noun
life	noun
way	noun
thing	noun
place	noun
work	noun
game	noun
team	noun
player	noun
city	noun
country	noun
company	noun
market	noun
price	noun
government	noun
news	noun
report	noun
week	noun
month	noun
night	noun
home	noun
school	noun
water	noun
food	noun
car	noun
love	verb
like	verb
enjoy	verb
hate	verb
dislike	verb
watch	verb
see	verb
make	verb
made	verb
take	verb
give	verb
find	verb
think	verb
feel	verb
seem	verb
become	verb
leave	verb
play	verb
run	verb
tell	verb
say	verb
said	verb
know	verb
want	verb
need	verb
try	verb
call	verb
keep	verb
begin	verb
entertain	verb
bore	verb
disappoint	verb
impress	verb
fail	verb
win	verb
lose	verb
buy	verb
sell	verb
rise	verb
fall	verb
grow	verb
good	adj
great	adj
excellent	adj
fine	adj
nice	adj
wonderful	adj
brilliant	adj
superb	adj
amazing	adj
terrific	adj
decent	adj
solid	adj
pleasant	adj
bad	adj
poor	adj
awful	adj
terrible	adj
horrible	adj
dreadful	adj
mediocre	adj
weak	adj
boring	adj
dull	adj
bland	adj
tedious	adj
fun	adj
funny	adj
sad	adj
happy	adj
beautiful	adj
ugly	adj
new	adj
old	adj
long	adj
short	adj
big	adj
small	adj
high	adj
low	adj
strong	adj
best	adj
worst	adj
better	adj
worse	adj
interesting	adj
original	adj
clever	adj
smart	adj
stupid	adj
silly	adj
very	adv
really	adv
quite	adv
too	adv
so	adv
rather	adv
fairly	adv
extremely	adv
truly	adv
deeply	adv
barely	adv
hardly	adv
almost	adv
well	adv
badly	adv
never	adv
always	adv
often	adv
sometimes	adv
still	adv
just	adv
also	adv
a	other
an	other
the	other
and	other
or	other
but	other
of	other
to	other
in	other
on	other
at	other
for	other
with	other
by	other
from	other
it	other
this	other
that	other
is	other
was	other
are	other
were	other
be	other
been	other
has	other
have	other
had	other
not	other
no	other
)TSV";

inline const PosLexicon& PosLexicon::builtin() {
  static const PosLexicon lexicon =
      PosLexicon::parse(kBuiltinPosLexicon, "<builtin>");
  return lexicon;
}

}  // namespace polysub

#endif  // POLYSUB_POS_LEXICON_DATA_HPP_
