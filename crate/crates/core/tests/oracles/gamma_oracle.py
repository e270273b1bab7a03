# Critical gamma for L0 = 3, alpha = 3/2: the root of prod_{j>=1}(1 - g/sqrt(L_j)) = 1/2,
# and the product at the four table entries used by the schedule check.
# Fourteen lengths suffice at 50 digits: the first omitted factor is 1 - O(1e-67).
from mpmath import mp, mpf, sqrt, findroot
from math import isqrt
mp.dps=50
L=[3]
while len(L)<14: L.append(isqrt(L[-1]**3))
def prod(g):
    p=mpf(1)
    for l in L[1:]:
        p*=1-g/sqrt(mpf(l))
    return p
print("last term", mp.nstr(mpf(1)/sqrt(mpf(L[-1])),5))
g=findroot(lambda g: prod(g)-mpf(1)/2, 0.6)
print(mp.nstr(g,30)); print(L[:6])
for x in [mpf('0.3'), g*(1-mpf('1e-9')), g*(1+mpf('1e-9')), mpf(1)]: print(mp.nstr(x,25), mp.nstr(prod(x),25))
