# Nonlinear Kreĭn extension toolkit
