"""Sign and orientation conventions, fixed once for the whole library.

Every pairing-dependent assertion elsewhere refers back to this ledger.

Curvature operator
    R(X, Y)Z = -D_X D_Y Z + D_Y D_X Z + D_[X,Y] Z, and the sectional
    curvature of span{u, v} is  sec(u, v) = <R(u, v)u, v> / Gram(u, v).
    With this pair of choices space forms report sec = -1 and the Jacobi
    equation along a unit-speed geodesic s -> g(s) reads
    J'' = -R(g', J)g', so <J'', J> >= |J|^2 whenever sec <= -1.

Complex structure (interleaved chart coordinates x1, y1, ..., xn, yn)
    J(d/dx_i) = d/dy_i and J(d/dy_i) = -d/dx_i.  J is a metric isometry
    and J^2 = -id exactly.

Fundamental 2-form
    omega(X, Y) = h(JX, Y), so omega(X, JX) = |X|^2 > 0.

Contact 1-form on distance spheres (beta(w) = dr(Jw))
    beta(grad r) = 0 and beta(J grad r) = -1.

Exterior derivative of beta versus the Hessian (uses DJ = 0):
    d beta(X, Y) = Hess r(X, JY) - Hess r(Y, JX), hence for X in the
    contact distribution
    d beta(X, JX) = -[Hess r(X, X) + Hess r(JX, JX)].
    The Levi pairing reported by the library is the positive quantity
    Hess r(X, X) + Hess r(JX, JX) = -d beta(X, JX); the relating
    constant is LEVI_PAIRING_SIGN = -1.

Norm on alternating forms
    The inner-product norm induced by h-orthonormal coframes (components
    in an orthonormal coframe, then the Euclidean norm).  Contraction by
    a unit vector never increases this norm, which is what the primitive
    bound chain requires.  The comass is only estimated for sanity
    comparisons; the two differ by at most C(m, k)^(1/2).

Complex hyperbolic normalization
    The ball-model Hermitian metric H_ij = (1-|z|^2)^{-1} delta_ij
    + (1-|z|^2)^{-2} conj(z_i) z_j is realized as a real metric without
    extra scale.  The curvature audit at the origin pins the convention:
    totally real planes give -1 (the maximum) and holomorphic planes -4,
    so the pinching constant is a = 2.
"""

# beta wedge / Levi pairing sign relating d(beta)(X, JX) to the Levi form.
LEVI_PAIRING_SIGN = -1.0

# Tag embedded in every emitted record so downstream comparisons across
# versions can detect a convention change.
CONVENTION_TAG = "curv-signs.v1;sec=<R(u,v)u,v>/gram;omega(X,JX)>0;beta=J.dr;levi=-dbeta(X,JX);norm=Lambda-k-innerproduct"

SCHEMA_VERSION = 1
