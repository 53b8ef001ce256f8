# Test package for the Kreĭn extension toolkit
